"""Shared construction helpers for the test suite."""

import math

import numpy as np

import sbhermite as sb

SWAP2 = np.array([[0.0, 1.0], [1.0, 0.0]])


def bargmann_triple(n: int = 1) -> sb.PhaseTriple:
    eye = np.eye(n)
    return sb.validate_phase_triple(0.5j * eye, -1j * eye, 1j * eye)


def bargmann_data(rho2: float = 3.0 / 16.0):
    """Standard triple with the solver basis (U = 1) and X = 1."""
    pt = bargmann_triple(1)
    wd = sb.compute_weight_data(pt)
    gen = sb.build_generator(wd, math.sqrt(rho2), np.eye(1))
    return pt, wd, gen


def em_data(s: float):
    """One-dimensional example family with its canonical (U, X, rho)."""
    a, b, c = sb.example_triple("em", s)
    pt = sb.validate_phase_triple(a, b, c)
    wd = sb.with_unitary(sb.compute_weight_data(pt), [[1j]])
    gen = sb.build_generator(wd, math.sqrt((1.0 - s) / (1.0 + s)), np.eye(1))
    return pt, wd, gen


def ghs_data(s: float):
    """Two-dimensional example family with its canonical (U, X, rho)."""
    a, b, c = sb.example_triple("ghs", s)
    pt = sb.validate_phase_triple(a, b, c)
    wd = sb.with_unitary(sb.compute_weight_data(pt), 1j * np.eye(2))
    gen = sb.build_generator(wd, math.sqrt((1.0 - s) / (2.0 * (1.0 + s))), SWAP2)
    return pt, wd, gen


def random_poly(n: int, degree: int, M, rng) -> sb.GaussPoly:
    terms = {
        alpha: complex(rng.standard_normal(), rng.standard_normal())
        for alpha in sb.multi_indices(n, degree)
    }
    return sb.GaussPoly(sb.PolyC(n, terms), M)


def assert_gp_close(a: sb.GaussPoly, b: sb.GaussPoly, rtol: float, msg: str = ""):
    diff, scale = sb.coeff_distance(a, b)
    assert diff <= rtol * max(scale, 1e-300), f"{msg}: {diff:.3e} > {rtol:.1e} * {scale:.3e}"
