"""Fast invariant suite behind ``mpi1d selfcheck``.

Each check returns ``(ok, detail)``; sizes are kept small so the whole run
takes a few seconds.
"""

from __future__ import annotations

import math
import sys

import numpy as np
from scipy import integrate, special

from . import assembly, imaging, io, physics, spectral, trajectory
from .grids import SpaceGrid, TimeGrid
from .operator import compose
from .physics import PhysicalParams

CHECKS = []


def check(name):
    def deco(fn):
        CHECKS.append((name, fn))
        return fn
    return deco


def fourier_quadrature(omega: float, cutoff: float = 60.0) -> float:
    """Unitary Fourier transform of ``L'`` by adaptive quadrature.

    Integrates ``L'(x) cos(wx)`` on ``[0, cutoff]`` and adds the tail of the
    ``1/x^2`` part in closed form via the sine/cosine integrals; the
    ``1/sinh^2`` part is below ``e^-120`` past the cutoff.
    """
    if omega == 0.0:
        head, _ = integrate.quad(physics.langevin_deriv, 0, cutoff, limit=400,
                                 epsabs=1e-13, epsrel=1e-13)
        tail = 1.0 / cutoff
    else:
        head, _ = integrate.quad(physics.langevin_deriv, 0, cutoff, weight="cos", wvar=omega,
                                 limit=400, epsabs=1e-13)
        si, _ = special.sici(omega * cutoff)
        tail = math.cos(omega * cutoff) / cutoff - omega * (math.pi / 2 - si)
    return 2.0 * (head + tail) / math.sqrt(2.0 * math.pi)


@check("langevin odd, bounded, increasing")
def _langevin():
    x = np.sort(np.random.default_rng(0).uniform(-50, 50, 10_000))
    L = physics.langevin(x)
    ok = (np.allclose(physics.langevin(-x), -L, rtol=0, atol=1e-15)
          and np.all(np.abs(L) < 1) and np.all(np.diff(L) >= 0))
    return ok, ""


@check("langevin derivative matches finite differences")
def _langevin_fd():
    x = np.linspace(0.01, 20, 400)
    h = 1e-5
    fd = (physics.langevin(x + h) - physics.langevin(x - h)) / (2 * h)
    err = np.max(np.abs(fd - physics.langevin_deriv(x)))
    return err < 1e-6, f"max err {err:.2e}"


@check("Fourier closed form matches quadrature")
def _fourier():
    err = max(abs(physics.langevin_deriv_fourier(w) - fourier_quadrature(w))
              for w in (0.0, 0.5, 1.0, 3.0, 10.0))
    return err < 1e-6, f"max err {err:.2e}"


@check("trajectory inverse round trip")
def _traj():
    p = PhysicalParams(2.0, 3.0, 0.7)
    t = np.linspace(0, p.T_period / 2, 101)
    err = max(np.max(np.abs(trajectory.gamma_g_inv(k, trajectory.gamma_g(k, t, p), p) - t))
              for k in ("cosine", "sawtooth"))
    return err < 1e-12 * p.T_period * 10, f"max err {err:.2e}"


@check("FOV restriction is an orthogonal projection")
def _proj():
    outer = SpaceGrid(41, -2.0, 2.0)
    inner = SpaceGrid(21, -1.0, 1.0)
    P = assembly.build_restriction(outer, inner).data
    Pi = P.T @ P
    ok = (np.array_equal(Pi @ Pi, Pi) and np.array_equal(Pi, Pi.T)
          and abs(np.linalg.norm(Pi, 2) - 1) < 1e-12)
    return ok, ""


@check("symmetrized core operator is symmetric positive semidefinite")
def _spd():
    # eigenvalues below the noise floor carry no sign information
    p = PhysicalParams(1.0, 1.0, 1.0, 1.0, 2.0)
    S = assembly.build_s_conv(SpaceGrid.fov(p, 201), p, symmetric=True).data
    ev = np.linalg.eigvalsh(S)
    floor = spectral.NOISE_FLOOR_FACTOR * ev[-1]
    return bool(np.array_equal(S, S.T) and ev[0] > -floor), f"min eigenvalue {ev[0]:.2e}"


@check("sawtooth trajectory operator scales norms by 4A/(GT)")
def _saw():
    p = PhysicalParams(3.0, 2.0, 1.5)
    sg = SpaceGrid.fov(p, 301)
    tg = TimeGrid.for_space(sg, p, oversample=1)
    Q = assembly.build_q_time("sawtooth", tg, sg, p).data
    f = np.random.default_rng(1).standard_normal((sg.n_points, 20))
    lhs = np.sum(tg.weights[:, None] * (Q @ f) ** 2, axis=0)
    rhs = 4 * p.A / (p.G * p.T_period) * np.sum(sg.weights[:, None] * f**2, axis=0)
    err = np.max(np.abs(lhs / rhs - 1))
    return err < 1e-8, f"max rel err {err:.2e}"


@check("cosine trajectory operator loses its smallest singular value under refinement")
def _cos_illposed():
    p = PhysicalParams(1.0, 1.0, 1.0)
    smin = []
    for n in (101, 401):
        sg = SpaceGrid.fov(p, n)
        Q = assembly.build_q_time("cosine", TimeGrid.for_space(sg, p), sg, p).data
        smin.append(np.linalg.svd(Q, compute_uv=False)[-1])
    return smin[1] < smin[0], f"{smin[0]:.2e} -> {smin[1]:.2e}"


@check("sine-transform and Chebyshev routes agree for the cosine trajectory")
def _paths():
    p = PhysicalParams(1.0, 1.0, 1.0, 1.0, 2.0)
    sg = SpaceGrid.fov(p, 401)
    tg = TimeGrid.for_space(sg, p)
    a = assembly.build_s_freq("cosine", tg, sg, 40, p, path="a").data
    b = assembly.build_s_freq("cosine", tg, sg, 40, p, path="b").data
    d = np.linalg.norm(a - b) / np.linalg.norm(b)
    return d < 1e-6, f"rel diff {d:.2e}"


@check("sine transform satisfies Parseval")
def _parseval():
    T = 2.0
    tg = TimeGrid(2001, T)
    t = tg.points
    w0 = 2 * np.pi / T
    f = np.sin(w0 * t) - 0.3 * np.sin(5 * w0 * t) + 0.1 * np.sin(12 * w0 * t)
    u = assembly.build_q_fft(tg, 40).apply(f)
    lhs = T * np.sum(u**2)
    rhs = np.sum(tg.weights * f**2)
    return abs(lhs / rhs - 1) < 1e-8, f"rel err {abs(lhs / rhs - 1):.2e}"


@check("decay-rate law: closed-form special values")
def _widom():
    r = spectral.widom_rate(math.log(1 + math.sqrt(2)))
    mono = all(spectral.widom_rate(a) > spectral.widom_rate(b)
               for a, b in ((0.01, 0.1), (0.1, 1.0), (1.0, 10.0), (10.0, 30.0)))
    return abs(r - math.pi) < 1e-12 and mono, f"rate {r!r}"


@check("elliptic K matches its defining integral")
def _ellk():
    errs = []
    for t in (0.0, 0.3, 2**-0.5, 0.99):
        ref, _ = integrate.quad(lambda th: 1 / math.sqrt(1 - (t * math.sin(th)) ** 2), 0,
                                math.pi / 2, epsabs=0, epsrel=1e-13)
        errs.append(abs(spectral.elliptic_k(t) / ref - 1))
    return max(errs) < 1e-13, f"max rel err {max(errs):.2e}"


@check("core spectrum decays at the predicted exponential rate")
def _decay():
    p = PhysicalParams(20.0, 1.0, 1.0, 1.0, 1.0)
    rep = spectral.singular_values(assembly.build_s_conv(SpaceGrid.fov(p, 1001), p, True))
    fit = spectral.fit_decay_rate(rep, 10, 100)
    rate = spectral.widom_rate(p.beta_a)
    dev = abs(fit.slope + rate) / rate
    return dev <= 0.15, f"slope {fit.slope:.4f} vs -{rate:.4f} ({dev:.1%})"


@check("Tikhonov filter matches normal equations")
def _tik():
    p = PhysicalParams(1.0, 1.0, 1.0, 1.0, 5.0)
    sg = SpaceGrid.fov(p, 101)
    op = assembly.build_s_time("cosine", TimeGrid.for_space(sg, p), sg, p)
    c = imaging.make_phantom("gaussian", 0.1, 0.15, 1.0, sg)
    s = imaging.forward(c, op)
    lam = 1e-3 * spectral.singular_values(op).sigmas[0] ** 2
    got = imaging.reconstruct_tikhonov(op, s, lam).values
    A = op.data
    ref = np.linalg.solve(A.T @ A + lam * np.eye(A.shape[1]), A.T @ s.samples)
    err = np.linalg.norm(got - ref) / np.linalg.norm(ref)
    return err < 1e-8, f"rel err {err:.2e}"


@check("forward model is linear")
def _linear():
    p = PhysicalParams(1.0, 1.0, 1.0, 1.0, 3.0)
    sg = SpaceGrid.fov(p, 101)
    op = assembly.build_s_time("cosine", TimeGrid.for_space(sg, p), sg, p)
    g1 = imaging.make_phantom("gaussian", -0.4, 0.1, 1.0, sg)
    g2 = imaging.make_phantom("gaussian", 0.3, 0.1, 0.5, sg)
    both = imaging.make_phantom("two_bumps", [-0.4, 0.3], [0.1, 0.1], [1.0, 0.5], sg)
    lhs = imaging.forward(both, op).samples
    rhs = imaging.forward(g1, op).samples + imaging.forward(g2, op).samples
    err = np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs))
    return err < 1e-12, f"rel err {err:.2e}"


@check("matrix file format round trip")
def _fmt():
    p = PhysicalParams(1.0, 1.0, 1.0)
    sg = SpaceGrid.fov(p, 31)
    op = compose([assembly.build_q_time("cosine", TimeGrid.for_space(sg, p, 2), sg, p),
                  assembly.build_s_conv(sg, p)])
    back = io.matrix_from_bytes(io.matrix_to_bytes(op))
    ok = (np.array_equal(back.data, op.data) and back.domain_tag == "fov"
          and back.codomain_tag == "time")
    return ok, ""


def run_selfcheck(out=None) -> bool:
    out = out if out is not None else sys.stdout
    all_ok = True
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed property, reported like one
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        all_ok &= bool(ok)
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        if detail:
            line += f"  ({detail})"
        print(line, file=out)
    return all_ok
