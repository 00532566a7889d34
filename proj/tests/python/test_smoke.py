import math
from pathlib import Path

import numpy as np
import pytest

import reinsure as r

ROOT = Path(__file__).resolve().parents[2]


def two_state():
    q = np.array([[-1.0, 1.0], [1.0, -1.0]])
    f = r.ClaimDistribution.exponential(5.0)
    return r.ModelSpec(q, [1.0, 2.0], [f, f], np.array([0.5, 0.5]))


def test_mgf_and_retention():
    assert r.mgf(r.ClaimDistribution.exponential(3.0), 1.0) == pytest.approx(1.5, rel=1e-14)
    assert r.retained(r.Contract.proportional(), 10.0, 0.3) == pytest.approx(3.0)
    assert r.retained(r.Contract.excess_of_loss(), 10.0, 4.0) == 4.0


def test_filter_jump():
    pi = r.jump_update(np.array([0.5, 0.5]), 0.3, two_state())
    assert abs(pi[0] - 1 / 3) < 1e-14 and abs(pi[1] - 2 / 3) < 1e-14
    assert np.allclose(r.ks_rhs(np.array([0.5, 0.5]), two_state()), [0.25, -0.25], atol=1e-15)


def test_premia():
    m = r.ModelSpec.single_state(2.0, r.ClaimDistribution.point_mass(1.0))
    one = np.ones(1)
    assert r.insurer_premium(one, m, r.Principle.EXPECTED_VALUE, 0.1) == pytest.approx(2.2)
    assert r.reinsurance_premium(one, m, r.Principle.EXPECTED_VALUE, 0.2, r.Contract.proportional(), 0.5) == pytest.approx(1.2)


def test_solve_and_evaluate():
    m = two_state()
    mkt = r.MarketParams(theta=0.3, theta_i=0.1)
    sol = r.solve(m, r.Contract.proportional(), r.PremiumSpec(), mkt, time_steps=50, resolution=11)
    assert len(sol.times) == 51
    assert all(v == 1.0 for v in sol.value[-1])
    u = sol.policy_at(0.0, np.array([0.5, 0.5]))
    assert 0.0 <= u <= 1.0
    uf = r.full_info_retention(m, 0, r.Contract.proportional(), r.PremiumSpec(), mkt, 0.0)
    assert max(max(s) for s in sol.policy) <= uf + 1e-6
    est = r.expected_utility(m, sol, r.Contract.proportional(), r.PremiumSpec(), mkt, [0.0, 1.0], 2000, 3)
    assert [e[0] for e in est][0] == "feedback"
    assert all(math.isfinite(e[1]) and e[2] > 0 for e in est)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        r.MarketParams(theta=0.05, theta_i=0.1)
    with pytest.raises(ValueError):
        r.load_scenario(str(ROOT / "scenarios" / "invalid_unknown_key.json"))
    cfg = r.load_scenario(str(ROOT / "scenarios" / "two_state.json"))
    assert cfg["model"].num_states == 2
