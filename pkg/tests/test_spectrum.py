import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from rabi2.errors import SpectralCollapseError, UsageError
from rabi2.gfunction import energy_grid
from rabi2.series import ModelParams
from rabi2.spectrum import (
    bargmann_norm_diag,
    bogoliubov_levels,
    build_hamiltonian,
    converged_spectrum,
    decoupled_levels,
    diagonalize,
    eigenvector_norm_diags,
    spectrum_vs_gscan,
)


# ---- matrix -------------------------------------------------------------

def test_matrix_entries(defaults):
    h = build_hamiltonian(defaults, 6)
    m, idx = h.matrix, h.row_index()
    assert np.array_equal(m, m.T)
    assert m[idx[(0, 0)], idx[(0, 1)]] == 0.35
    assert m[idx[(3, 0)], idx[(3, 0)]] == 3.0
    amp = 0.2 * math.sqrt(2)
    assert m[idx[(0, 0)], idx[(2, 0)]] == pytest.approx(amp, rel=0, abs=1e-16)
    assert m[idx[(0, 1)], idx[(2, 1)]] == pytest.approx(-amp, rel=0, abs=1e-16)
    # a^2 never couples photon numbers of different parity or spin flips with photons
    for (n, s), i in idx.items():
        for (k, t), j in idx.items():
            if m[i, j] and i != j:
                assert (n == k and s != t) or (abs(n - k) == 2 and s == t)


def test_bare_two_level_block(defaults):
    res = diagonalize(build_hamiltonian(defaults, 0, allow_small=True))
    assert np.allclose(res.eigenvalues, [-0.35, 0.35], atol=1e-15)
    with pytest.raises(UsageError):
        build_hamiltonian(defaults, 1)


def test_chains_reproduce_matrix(defaults):
    h = build_hamiltonian(defaults, 9)
    rebuilt = np.zeros_like(h.matrix)
    r = math.sqrt(0.5)
    for c in h.chains():
        basis = np.zeros((h.dimension, c.diagonal.size))
        basis[c.up_rows, np.arange(c.diagonal.size)] = r
        basis[c.down_rows, np.arange(c.diagonal.size)] = r * c.signs
        t = np.diag(c.diagonal) + np.diag(c.offdiagonal, 1) + np.diag(c.offdiagonal, -1)
        rebuilt += basis @ t @ basis.T
    assert np.allclose(rebuilt, h.matrix, atol=1e-14)


def test_identity_and_small_dense():
    assert np.array_equal(diagonalize(np.eye(3)).eigenvalues, np.ones(3))
    res = diagonalize(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert np.allclose(res.eigenvalues, [-1.0, 3.0], atol=1e-15)
    with pytest.raises(UsageError):
        diagonalize(np.eye(2), method="chains")


@pytest.mark.parametrize("params", [ModelParams("1/10", 1, "7/10"), ModelParams("-1/5", 1, "3/2"),
                                    ModelParams("1/7", 2, "-1/3")])
def test_methods_agree_with_lapack(params):
    h = build_hamiltonian(params, 40)
    ref = np.linalg.eigvalsh(h.matrix)
    chains = diagonalize(h, 1e-12)
    dense = diagonalize(h, 1e-12, method="dense")
    scale = np.max(np.abs(ref))
    assert np.max(np.abs(chains.eigenvalues - ref)) <= 1e-13 * scale
    assert np.max(np.abs(dense.eigenvalues - ref)) <= 1e-13 * scale
    assert chains.residual_bound <= 1e-12 * scale
    v = chains.eigenvectors
    assert np.max(np.abs(v.T @ v - np.eye(v.shape[1]))) <= 1e-12


def test_parity_blocks_partition_spectrum(defaults):
    full = diagonalize(build_hamiltonian(defaults, 41)).eigenvalues
    even = diagonalize(build_hamiltonian(defaults, 41, "even")).eigenvalues
    odd = diagonalize(build_hamiltonian(defaults, 41, "odd")).eigenvalues
    assert np.allclose(np.sort(np.concatenate((even, odd))), full, atol=1e-12)
    with pytest.raises(UsageError):
        build_hamiltonian(defaults, 10, "sideways")


def test_interlacing_between_cutoffs(defaults):
    small = diagonalize(build_hamiltonian(defaults, 60)).eigenvalues
    large = diagonalize(build_hamiltonian(defaults, 62)).eigenvalues
    slack = 64 * np.finfo(float).eps * np.max(np.abs(large))
    assert np.all(large[:small.size] <= small + slack)


# ---- oracles ------------------------------------------------------------

def test_decoupled_levels():
    p = ModelParams(0, 1, "7/10")
    res = diagonalize(build_hamiltonian(p, 50))
    assert np.max(np.abs(res.eigenvalues[:30] - decoupled_levels(p, 30))) <= 1e-13
    assert list(decoupled_levels(p, 4)) == [-0.35, 0.35, 0.65, 1.35]


def test_bogoliubov_levels():
    p = ModelParams("1/10", 1, 0)
    w = diagonalize(build_hamiltonian(p, 400)).eigenvalues[:12]
    assert np.max(np.abs(w - bogoliubov_levels(p, 12))) <= 1e-10
    eps = math.sqrt(1 - 0.16)
    assert bogoliubov_levels(p, 3) == pytest.approx([eps / 2 - 0.5] * 2 + [1.5 * eps - 0.5])
    with pytest.raises(UsageError):
        bogoliubov_levels(ModelParams("1/10", 1, 1), 3)


@pytest.mark.parametrize("g", ["1/4", "-1/4", "3/10"])
@pytest.mark.parametrize("omega0", ["0", "7/10"])
def test_collapse_refused(g, omega0):
    with pytest.raises(SpectralCollapseError, match="collapse"):
        build_hamiltonian(ModelParams(g, 1, omega0), 10)


# ---- convergence --------------------------------------------------------

def test_converged_spectrum_defaults(defaults):
    res = converged_spectrum(defaults, 500, 600, 1e-10)
    assert res.converged_count >= 10 and res.status == "ok"
    ref = diagonalize(build_hamiltonian(defaults, 700)).eigenvalues
    assert np.max(np.abs(res.eigenvalues[:10] - ref[:10])) <= 1e-10
    assert res.residual_bound <= 1e-10 * np.max(np.abs(res.full.eigenvalues))
    assert res.eigenvectors.shape == (1202, res.converged_count)


def test_converged_spectrum_g_zero_is_exact():
    p = ModelParams(0, 1, "7/10")
    res = converged_spectrum(p, 20, 30)
    assert res.converged_count == 42
    assert np.allclose(res.eigenvalues, decoupled_levels(p, 42), atol=1e-13)


def test_converged_spectrum_parity_and_usage(defaults):
    even = converged_spectrum(defaults, 100, 120, parity_block="even")
    assert even.converged_count > 0
    with pytest.raises(UsageError):
        converged_spectrum(defaults, 120, 100)


def test_near_collapse_warns_when_nothing_converges():
    p = ModelParams("249/1000", 1, "7/10")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = converged_spectrum(p, 10, 12, 1e-12)
    assert res.converged_count == 0 and res.status == "warning"
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


# ---- Bargmann diagnostics -----------------------------------------------

def test_unit_vector_converges():
    diag = bargmann_norm_diag([1.0] + [0.0] * 30)
    assert diag.classification == "converging"
    assert diag.norm_squared == pytest.approx(1.0)


def test_exponential_in_monomial_basis():
    coeffs = [1 / math.factorial(n) for n in range(60)]
    diag = bargmann_norm_diag(coeffs, "monomial")
    assert diag.classification == "converging"
    assert diag.norm_squared == pytest.approx(math.e, rel=1e-12)


def test_divergent_monomial_series():
    coeffs = [1 / math.sqrt(math.factorial(n)) for n in range(60)]
    assert bargmann_norm_diag(coeffs, "monomial").classification == "diverging"


def test_short_or_empty_input_is_inconclusive():
    assert bargmann_norm_diag([0.5, 0.25]).classification == "inconclusive"
    assert bargmann_norm_diag([0.0, 0.0]).classification == "inconclusive"
    with pytest.raises(UsageError):
        bargmann_norm_diag([1.0], "legendre")


def test_eigenvector_components_are_normalizable(defaults):
    h = build_hamiltonian(defaults, 200)
    res = diagonalize(h)
    diags = eigenvector_norm_diags(h, res.eigenvectors[:, 0])
    assert {d.classification for d in diags.values()} == {"converging"}
    total = sum(d.norm_squared for d in diags.values())
    assert total == pytest.approx(1.0, rel=1e-12)


# ---- report -------------------------------------------------------------

def test_report_defaults(defaults):
    rep = spectrum_vs_gscan(defaults, energy_grid(0, 2, 5), Fraction(1, 3),
                            cutoffs=(100, 120), order=48, control=True)
    assert rep.scan.all_zero and rep.scan_vacuous
    assert rep.control.zero_count == 0
    assert rep.spectrum.converged_count > 10
    assert "singles out no energy" in rep.conclusion()


def test_report_g_zero_skips_scan():
    rep = spectrum_vs_gscan(ModelParams(0, 1, "7/10"), energy_grid(0, 2, 5), cutoffs=(20, 30))
    assert rep.scan is None and "g = 0" in rep.scan_skipped
    assert "not run" in rep.conclusion()
