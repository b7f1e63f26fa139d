"""One test per acceptance criterion; each prints a single PASS/FAIL line.

The lines are also collected into the terminal summary by ``conftest.py``.
"""

import numpy as np
import pytest

from moyalstar.models import ModelPreset
from moyalstar.verify import (VerifyConfig, suite_closed_forms, suite_dirichlet, suite_ermakov, suite_evolution,
                              suite_hbar0, suite_invariant, suite_oracle, suite_projection, suite_route,
                              suite_stargenvalue)

from .conftest import ACCEPTANCE

PRESETS = [ModelPreset("sho"), ModelPreset("ck"), ModelPreset("tdf"), ModelPreset("tdf", {"profile": "quench"})]


def report(k: int, title: str, rows: list[dict]) -> None:
    ok = all(r["pass"] for r in rows)
    worst = max(rows, key=lambda r: (not r["pass"], r["value"] / r["tolerance"] if r["tolerance"] else r["value"]))
    line = (f"criterion {k} {'PASS' if ok else 'FAIL'}: {title} "
            f"[worst {worst['suite']}/{worst['metric']} = {worst['value']:.3g}, tol {worst['tolerance']:.3g}]")
    ACCEPTANCE[k] = line
    print(line)
    failed = [f"{r['metric']} = {r['value']:.3g} > {r['tolerance']:.3g}" for r in rows if not r["pass"]]
    assert ok, "; ".join(failed)


def test_1_oracle_equivalence():
    report(1, "star engine vs operator oracle", suite_oracle(VerifyConfig()))


def test_2_stargenvalue():
    report(2, "H * W_n = hbar Omega (n + 1/2) W_n, n = 0..10", suite_stargenvalue(VerifyConfig()))


def test_3_projection_algebra():
    report(3, "W_m * W_n = delta_mn c W_n", suite_projection(VerifyConfig()))


def test_4_ermakov_and_invariant():
    rows = []
    for preset in PRESETS:
        cfg = VerifyConfig(model=preset)
        rows += suite_ermakov(cfg) + suite_invariant(cfg)
    report(4, "auxiliary-equation residual and invariant drift, all presets", rows)


def test_5_caldirola_kanai_closed_forms():
    rows = suite_closed_forms(VerifyConfig(model=ModelPreset("ck", {"m0": 1.0, "gamma0": 0.6, "omega0": 1.0})))
    assert {r["metric"].split("_")[-1] for r in rows} >= {"rho", "tau"}
    report(5, "Caldirola-Kanai rho, tau and phase functions", rows)


def test_6_star_exponential_routes():
    # expected to fail: at r = 0.999, n_max = 400 the truncation remainder is of order r^401 ~ 0.67,
    # and even the untruncated r-series is biased by about 2(1 - r)H ~ 2e-2 at the interior corners
    report(6, "closed form vs propagator vs Abel-summed Fourier-Dirichlet",
           suite_route(VerifyConfig()) + suite_dirichlet(VerifyConfig()))


def test_7_evolution():
    report(7, "star conjugation vs rotation, fixed points, conservation", suite_evolution(VerifyConfig()))


def test_8_classical_limit():
    report(8, "hbar -> 0 contract", suite_hbar0(VerifyConfig()))


@pytest.mark.parametrize("hbar", [0.5])
def test_suites_at_other_hbar(hbar):
    cfg = VerifyConfig(hbar=hbar)
    rows = (suite_oracle(cfg, n_pairs=5) + suite_stargenvalue(cfg) + suite_projection(cfg) + suite_route(cfg)
            + suite_evolution(cfg) + suite_hbar0(cfg))
    bad = [r for r in rows if not r["pass"]]
    assert not bad, bad


def test_fault_injection_is_detected():
    cfg = VerifyConfig(engine_hbar=1.1)
    rows = suite_stargenvalue(cfg) + suite_projection(cfg) + suite_route(cfg)
    assert {r["suite"] for r in rows if not r["pass"]} == {"stargenvalue", "projection", "route"}
    assert np.isfinite([r["value"] for r in rows]).all()
