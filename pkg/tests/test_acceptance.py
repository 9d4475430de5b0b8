"""Acceptance criteria, one printed pass/fail line each.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines next
to the pytest verdicts; they are also collected into the terminal summary.
"""

import json
import math

import pytest

from conftest import ALL_MODELS
from lamperti_ou.cli import main
from lamperti_ou.experiments import (
    exp_additive_functional,
    exp_darling_kac,
    exp_invariant_mass,
    exp_moments,
    exp_negative_control,
    exp_nu_identity,
    exp_patie,
    exp_recurrence,
    exp_stationarity,
    exp_support,
)
from lamperti_ou.models import JumpLaw, LevyModel
from lamperti_ou.processes import SupportCase, support_interval

pytestmark = pytest.mark.slow

POISSON = LevyModel.compound_poisson(1.0, JumpLaw.constant(1.0))
STABLE = LevyModel.stable_subordinator(0.5)
LINES: list[str] = []


def verdict(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    LINES.append(line)
    print(line)
    assert ok, line


def test_c01_invariant_mass():
    a = exp_invariant_mass(POISSON, n=100_000, seed=1)
    b = exp_invariant_mass(LevyModel.brownian(1.0, 0.7), n=100_000, seed=1)
    sa, sb = a.stats[0], b.stats[0]
    verdict(1, "E[1/hat I] = E[xi_1]", a.verdict and b.verdict,
            f"poisson {sa['value']:.5f}+-{sa['std_err']:.1e} (1), brownian {sb['value']:.5f}+-{sb['std_err']:.1e} (0.7)")


def test_c02_moments():
    r = exp_moments(POISSON, orders=(1, 2), n=100_000, seed=2)
    m1, m2 = r.stats
    ok = r.verdict and abs(m1["oracle"] - 1.581977) < 1e-6 and abs(m2["oracle"] - 3.65917) < 1e-5
    verdict(2, "moment oracle", ok,
            f"E[I]={m1['value']:.5f} vs {m1['oracle']:.6f}, E[I^2]={m2['value']:.5f} vs {m2['oracle']:.5f}")


def test_c03_nu_inverse_identity():
    bad, worst = [], 0.0
    for m in ALL_MODELS:
        r = exp_nu_identity(m, n=20_000, seed=3)
        worst = max(worst, abs(r.stats[0]["value"] - 1.0))
        if not r.verdict:
            bad.append(m.label())
    verdict(3, "<nu, 1/x> = 1", not bad, f"{len(ALL_MODELS)} models, max |dev| {worst:.1e}, failing {bad or 'none'}")


def test_c04_stationarity():
    out = []
    for m in (POISSON, STABLE):
        r = exp_stationarity(m, t_list=(1.0, 5.0), n_reps=10_000, seed=4)
        out.append((m.label(), r.verdict, [s["p_value"] for s in r.stats]))
    verdict(4, "stationarity KS p > 0.001", all(o[1] for o in out),
            "; ".join(f"{lab} p={', '.join(f'{p:.3f}' for p in ps)}" for lab, _, ps in out))


def test_c05_patie():
    r = exp_patie(POISSON, n_paths=1000, t_list=(0.5, 1.0, 2.0), seed=5)
    v = r.stats[0]["value"]
    verdict(5, "U(t) = 1/V(T_V(t)) on skeletons", v < 1e-9, f"max abs diff {v:.2e} < 1e-9")


def test_c06_additive_functional():
    a = exp_additive_functional(POISSON, n_paths=20, seed=6)
    b = exp_additive_functional(LevyModel.brownian(1.0, 1.0), n_paths=20, seed=6)
    verdict(6, "quadrature of 1/V = log-ratio of integrals", a.verdict and b.verdict,
            f"skeleton max {a.stats[0]['value']:.1e} (<1e-9), grid max {b.stats[0]['value']:.1e} "
            f"(bound >= {b.stats[0]['bound']:.1e})")


def test_c07_darling_kac():
    r = exp_darling_kac(STABLE, t_list=(10.0, 100.0, 1000.0), n_reps=10_000, seed=7)
    last, oracle = r.stats[2], r.stats[-1]
    ks = [s["ks_distance_ml"] for s in r.stats[:3]]
    ok = r.verdict and oracle["ks_decreasing"]
    verdict(7, "Darling-Kac for alpha = 0.5", ok,
            f"mean {last['mean']:.4f} (2/sqrt(pi)={2 / math.sqrt(math.pi):.4f}, 10%), "
            f"second {last['second_moment']:.4f} (2, 15%), KS {', '.join(f'{d:.4f}' for d in ks)} "
            f"(noise ~{oracle['ks_noise_level']:.4f})")


def test_c08_negative_control():
    r = exp_negative_control(POISSON, t_list=(10.0, 1000.0), n_reps=10_000, seed=8)
    dk = exp_darling_kac(POISSON, n_reps=10, seed=8)
    ratio = r.stats[-1]["value"]
    verdict(8, "finite-mean negative control", r.verdict and ratio <= 0.2 and not dk.verdict,
            f"variance ratio {ratio:.4f} <= 0.2, darling-kac verdict {'pass' if dk.verdict else 'fail'}")


def test_c09_recurrence():
    r = exp_recurrence(LevyModel.brownian(1.0, 1.0), x=1.0, epsilon=0.25, horizon=200.0, n_reps=1000, seed=9)
    fr = [s["fraction"] for s in r.stats]
    verdict(9, "topological recurrence", r.verdict and fr[-1] >= 0.95 and fr == sorted(fr),
            f"hit fractions {', '.join(f'{p:.3f}' for p in fr)} at horizons 25..200")


def test_c10_support():
    models = {
        SupportCase.SUBORDINATOR_WITH_DRIFT: LevyModel.compound_poisson(1.0, JumpLaw.constant(1.0), drift=2.0),
        SupportCase.NO_POSITIVE_JUMPS: LevyModel.compound_poisson(1.0, JumpLaw.constant(-1.0), drift=2.0),
        SupportCase.FULL: POISSON,
    }
    ok, parts = True, []
    for case, m in models.items():
        s = support_interval(m)
        r = exp_support(m, n=100_000, seed=10)
        st = r.stats[0]
        ok &= s.case is case and r.verdict
        if case is SupportCase.SUBORDINATOR_WITH_DRIFT:
            ok &= st["max"] <= 1.0 / m.drift
        parts.append(f"{case.value} [{s.lower:g}, {s.upper:g}] saw [{st['min']:.4g}, {st['max']:.4g}]")
    verdict(10, "support trichotomy", ok, "; ".join(parts))


def test_c11_determinism(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[model]\nfamily = CompoundPoissonDrift\nrate = 1\njump_law = constant\njump_param = 1\n"
                   "[experiment]\nname = mixing\nn_reps = 2000\nseed = 11\n")
    reports = []
    for k in (1, 4):
        out = tmp_path / f"t{k}"
        main(["verify", "--config", str(cfg), "--out", str(out), "--threads", str(k), "--quiet"])
        rep = json.loads((out / "report.json").read_text())
        rep.pop("runtime_s")
        reports.append(rep)
    verdict(11, "thread-count determinism", reports[0] == reports[1], "report.json identical for 1 and 4 threads")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-s", "-q"]))
