"""Batch verification suites exercised by the CLI ``verify`` subcommand.

Each suite generates seeded fixtures, runs the cross-equivalence checks of
the structure module on them, and reports one row per check. Suite IDs
(thm32, thm34, thm42, thm45, prop48, appA) are a stable part of the CLI
contract.
"""

from __future__ import annotations

import numpy as np

from . import complement, matcore, reprs, structure, zoo
from .matcore import Tolerance, dagger, default_tolerance, frobenius
from .reprs import HolevoForm, KrausRep

__all__ = ["SUITES", "run_suite"]


def _row(instance: int, case: str, ok: bool, detail: str = "", residual=None) -> dict:
    out = {"instance": instance, "case": case, "ok": bool(ok), "detail": detail}
    if residual is not None:
        out["residual"] = float(residual)
    return out


def _choi_distance(k1: KrausRep, k2: KrausRep) -> float:
    c1 = reprs.choi_from_kraus(k1).mat
    c2 = reprs.choi_from_kraus(k2).mat
    return frobenius(c1 - c2)


def _suite_thm32(n: int, seed: int, tol: Tolerance) -> list[dict]:
    """Equivalence of the degradability conditions on measure-prepare channels.

    For each instance one fixture that satisfies the orthogonality
    condition by construction and one violator with a broken orthogonality;
    the degradability certificate, the orthogonality test, PPT of the
    minimal complement and self-complementarity must agree on both.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        d_in = int(rng.integers(2, 6))
        d_out = int(rng.integers(2, 6))
        classes = int(rng.integers(2, d_out + 1)) if d_out > 2 else 2
        sub_seed = int(rng.integers(0, 2**31))

        for case, make, expect in (
            ("fixture", zoo.random_degradable_seb, "True"),
            ("violator", zoo.random_seb_violator, "False"),
        ):
            h = make(d_in, d_out, classes, sub_seed)
            k = reprs.holevo_to_kraus(h, tol)
            verdicts = {
                "degradable": structure.degradability_via_inverse(k, tol).verdict.value,
                "orthogonality": structure.degradable_seb_test(h, tol).verdict.value,
                "complement-ppt": structure.is_ppt(
                    complement.minimal_complement(k, tol), tol
                ).verdict.value,
                "self-complementary": complement.is_self_complementary(k, tol).verdict.value,
            }
            ok = all(v == expect for v in verdicts.values())
            rows.append(
                _row(
                    i,
                    f"{case} d={d_in}x{d_out} classes={classes}",
                    ok,
                    detail="/".join(f"{key}={val}" for key, val in verdicts.items()),
                )
            )
    return rows


def _suite_thm34(n: int, seed: int, tol: Tolerance) -> list[dict]:
    """Multiplier channels are entanglement breaking exactly when diagonal."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        d = 2 + i % 4
        diag = np.diag(0.2 + rng.random(d))
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        full = g @ dagger(g)
        for case, a, expect in (("diagonal", diag, True), ("generic", full, False)):
            cert = structure.schur_characterization(a, tol)
            ok = (cert.verdict.value == "True") == expect
            ok = ok and (cert.witness["complement_degradable"] == expect)
            ok = ok and cert.witness["complement_always_eb"]
            rows.append(_row(i, f"{case} d={d}", ok, detail=f"verdict={cert.verdict.value}"))
    return rows


def _ueb_fixture(rng: np.random.Generator, d1: int, d2: int):
    us = []
    for _ in range(d2):
        u = rng.normal(size=d1) + 1j * rng.normal(size=d1)
        us.append(u / np.linalg.norm(u))
    vs = zoo._haar_unitary(rng, d2)
    k = zoo.cstar_extreme_gen(us, [vs[:, i] for i in range(d2)])
    pairs = tuple(
        (np.outer(u, np.conj(u)), np.outer(vs[:, i], np.conj(vs[:, i])))
        for i, u in enumerate(us)
    )
    return k, HolevoForm(d1, d2, pairs)


def _suite_thm42(n: int, seed: int, tol: Tolerance) -> list[dict]:
    """Degradable unital entanglement-breaking maps are exactly the extreme ones."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        d1 = int(rng.integers(2, 5))
        d2 = int(rng.integers(2, 5))
        k1, h1 = _ueb_fixture(rng, d1, d2)
        cstar = structure.cstar_extreme_test(k1, tol).verdict.value
        degr = structure.degradable_seb_test(h1, tol).verdict.value
        rows.append(
            _row(i, f"extreme d={d1}x{d2}", cstar == "True" and degr == "True",
                 detail=f"cstar={cstar} degradable={degr}")
        )

        k2, h2 = _ueb_fixture(rng, d1, d2)
        mix_ops = tuple(op / np.sqrt(2.0) for op in (k1.ops + k2.ops))
        mix = KrausRep(d1, d2, mix_ops)
        mix_pairs = tuple((f / 2.0, r) for f, r in (h1.pairs + h2.pairs))
        mix_h = HolevoForm(d1, d2, mix_pairs)
        cstar = structure.cstar_extreme_test(mix, tol).verdict.value
        degr = structure.degradable_seb_test(mix_h, tol).verdict.value
        rows.append(
            _row(i, f"mixture d={d1}x{d2}", cstar == "False" and degr == "False",
                 detail=f"cstar={cstar} degradable={degr}")
        )
    return rows


def _suite_thm45(n: int, seed: int, tol: Tolerance) -> list[dict]:
    """Five-way agreement of the projection-Choi conditions."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        d = 2 + i % 2
        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        a = g @ dagger(g) + 0.1 * np.eye(d)
        norm = np.diag(1.0 / np.sqrt(np.diag(a).real))
        a = norm @ a @ norm
        ch = zoo.schur_complement_map(a, tol)
        bundle = structure.choi_projection_equivalences(ch, tol)
        residual = bundle.conditions[4].witness["factorisation_residual"]
        ok = bundle.agree and bundle.verdict.value == "True" and residual <= 1e-8
        rows.append(_row(i, f"unit-diagonal multiplier d={d}", ok, residual=residual))

        lam_wh = -1.0 + (1.0 / d + 1.0) * rng.random()
        wh = zoo.werner_holevo(d, lam_wh, tol)
        bundle = structure.choi_projection_equivalences(wh, tol)
        rows.append(
            _row(i, f"werner-holevo d={d} lam={lam_wh:.3f}",
                 bundle.agree and bundle.verdict.value == "False")
        )

        lam_pl = -1.0 / 3.0 + (1.0 + 1.0 / 3.0) * rng.random()
        pl = zoo.phi_lambda(2, lam_pl, tol)
        bundle = structure.choi_projection_equivalences(pl, tol)
        rows.append(
            _row(i, f"phi-lambda d=2 lam={lam_pl:.3f}",
                 bundle.agree and bundle.verdict.value == "False")
        )
    return rows


def _suite_prop48(n: int, seed: int, tol: Tolerance) -> list[dict]:
    """Block direct sums of pure maps are degradable via the block-trace map."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        d = int(rng.integers(2, 5))
        blocks = [
            rng.normal(size=(d, int(rng.integers(1, 3))))
            + 1j * rng.normal(size=(d, int(rng.integers(1, 3))))
            for _ in range(int(rng.integers(1, 4)))
        ]
        channel, gamma = zoo.direct_sum_pure(blocks)
        comp = complement.complement_from_kraus(channel)
        residual = _choi_distance(reprs.compose(gamma, channel), comp)
        rows.append(
            _row(i, f"blocks={len(blocks)} d={d}", residual <= 1e-8, residual=residual)
        )
    return rows


def _suite_appa(n: int, seed: int, tol: Tolerance) -> list[dict]:
    """Complement formula against the dilation, and isometry recovery."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        d_in = int(rng.integers(2, 5))
        d_out = int(rng.integers(2, 5))
        cr_lo = (d_in + d_out - 1) // d_out
        cr_hi = min(d_in * d_out, 6)
        cr = int(rng.integers(cr_lo, cr_hi + 1))
        k = zoo.random_channel(d_in, d_out, cr, int(rng.integers(0, 2**31)))

        # Complement formula vs tracing the output side of the dilation.
        s = reprs.stinespring_from_kraus(k)
        comp = complement.complement_from_kraus(k)
        worst = 0.0
        for a in range(d_in):
            for b in range(d_in):
                e = matcore.matrix_unit(d_in, a, b)
                lhs = matcore.partial_trace(s.a @ e @ dagger(s.a), (d_out, s.env_dim), "first")
                worst = max(worst, frobenius(lhs - reprs.apply(comp, e)))
        rows.append(_row(i, f"complement formula d={d_in}x{d_out}", worst <= 1e-10,
                         residual=worst))

        # Connecting isometry: recover a unitary mixing of the minimal family.
        minimal = reprs.kraus_from_choi(reprs.choi_from_kraus(k), tol)
        s1 = reprs.stinespring_from_kraus(minimal)
        u = zoo._haar_unitary(rng, minimal.num_ops)
        mixed = KrausRep(
            d_in,
            d_out,
            tuple(
                sum(u[r, c] * minimal.ops[c] for c in range(minimal.num_ops))
                for r in range(minimal.num_ops)
            ),
        )
        s2 = reprs.stinespring_from_kraus(mixed)
        v = complement.connecting_isometry(s1, s2, tol)
        ok = v is not None and frobenius(v - u) <= 1e-8
        rows.append(_row(i, f"isometry recovery env={minimal.num_ops}", ok,
                         residual=None if v is None else frobenius(v - u)))
    return rows


SUITES = {
    "thm32": _suite_thm32,
    "thm34": _suite_thm34,
    "thm42": _suite_thm42,
    "thm45": _suite_thm45,
    "prop48": _suite_prop48,
    "appA": _suite_appa,
}


def run_suite(
    suite: str, n: int, seed: int, tol: Tolerance | None = None
) -> tuple[list[dict], bool]:
    """Run a named suite; returns its rows and whether every check passed."""
    tol = tol or default_tolerance()
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    rows = SUITES[suite](n, seed, tol)
    return rows, all(r["ok"] for r in rows)
