"""End-to-end elections over the simulated network: integrity, validity,
termination, emergency mode, delegation, and double-vote protection."""

from fractions import Fraction

import pytest

from covote.config import TrustEdge
from covote.scenarios import ScenarioSpec, build_election, run_scenario
from covote.simnet import SILENT, Behavior, crash_at, delay_all


def run_checked(spec, **kw):
    """Run a scenario and assert the universal engine invariants."""
    m = run_scenario(spec, **kw)
    if m.decision is not None and m.accepted is not None:
        # integrity: the decided tally equals the clear-text weighted sum
        assert m.ground_truth_tally is not None
        assert m.decision.tally == m.ground_truth_tally
        if m.decision.mode != "EARLY":
            assert m.decision.weight_sum == m.weight_sum
            assert m.decision.approved == (
                m.weight_sum > 0
                and Fraction(m.decision.tally) >= spec.threshold * m.weight_sum
            )
    return m


def test_unanimous_yes_approves():
    m = run_checked(ScenarioSpec(n=4, f=1, votes={i: 1 for i in range(1, 5)}, timeout=1.0))
    assert m.decision is not None and m.decision.approved
    assert m.accepted == [1, 2, 3, 4]
    assert m.decision.tally == 4


def test_unanimous_no_rejects():
    m = run_checked(ScenarioSpec(n=4, f=1, votes={i: 0 for i in range(1, 5)}, timeout=1.0))
    assert m.decision is not None and not m.decision.approved
    assert m.decision.tally == 0


def test_threshold_is_inclusive():
    # 2 of 4 yes at t=1/2: 2 >= 2 approves
    m = run_checked(
        ScenarioSpec(n=4, f=1, votes={1: 1, 2: 1, 3: 0, 4: 0}, timeout=1.0)
    )
    assert m.decision.approved


def test_weighted_election():
    # weights 5 and 3 with two more unit voters; only the heavy voter says yes
    m = run_checked(
        ScenarioSpec(
            n=4, f=1, votes={1: 1, 2: 0, 3: 0, 4: 0},
            weights={1: 5, 2: 3, 3: 1, 4: 1}, threshold=Fraction(1, 2), timeout=1.0,
        )
    )
    assert m.decision.tally == 5
    assert m.decision.approved  # 5 >= 10/2


def test_termination_with_silent_voter():
    m = run_checked(
        ScenarioSpec(n=4, f=1, votes={1: 1, 2: 1, 3: 0, 4: 1},
                     adversary={4: SILENT}, timeout=1.0, seed=3)
    )
    assert m.decision is not None
    assert m.accepted == [1, 2, 3]
    assert not m.deadlock


def test_termination_with_crash():
    m = run_checked(
        ScenarioSpec(n=7, f=2, votes={i: 1 for i in range(1, 8)},
                     adversary={2: crash_at(30), 5: SILENT}, timeout=1.0, seed=4)
    )
    assert m.decision is not None


def test_invalid_vote_never_counted():
    for seed in range(10):
        m = run_checked(
            ScenarioSpec(n=4, f=1, votes={i: 1 for i in range(1, 5)},
                         adversary={2: Behavior("INVALID_VOTE", vote=2)},
                         timeout=1.0, seed=seed)
        )
        assert m.decision is not None
        assert 2 not in m.accepted
        assert m.decision.tally == 3


def test_invalid_shares_ballot_still_counts():
    # the dealer's ballot is honest; only some private shares are corrupted
    m = run_checked(
        ScenarioSpec(n=4, f=1, votes={1: 1, 2: 0, 3: 1, 4: 1},
                     adversary={2: Behavior("INVALID_SHARES")}, timeout=1.0, seed=7)
    )
    assert m.accepted == [1, 2, 3, 4]
    assert m.decision.tally == 3


def test_equivocating_voter_excluded_or_consistent():
    for seed in range(10):
        m = run_checked(
            ScenarioSpec(n=4, f=1, votes={1: 1, 2: 0, 3: 1, 4: 1},
                         adversary={2: Behavior("EQUIVOCATE")}, timeout=1.0, seed=seed)
        )
        assert m.decision is not None
        # reliable broadcast blocks the split dealing entirely
        assert 2 not in m.accepted


def test_asynchronous_validity_floor():
    # at least n-2f correct votes are always counted
    n, f = 4, 1
    for seed in range(5):
        m = run_checked(
            ScenarioSpec(n=n, f=f, votes={i: 1 for i in range(1, n + 1)},
                         adversary={3: SILENT}, timeout=1.0, seed=seed)
        )
        correct_counted = [i for i in m.accepted if i != 3]
        assert len(correct_counted) >= n - 2 * f


def test_delayed_voter_missed_by_window():
    # voter 4 thinks for longer than the timeout; the window closes without it
    m = run_checked(
        ScenarioSpec(n=4, f=1, votes={1: 1, 2: 1, 3: 1, 4: 1},
                     think_delays={4: 5.0}, timeout=0.5, seed=2)
    )
    assert m.decision is not None
    assert 4 not in m.accepted


def test_pre_gst_reordering_safe():
    for seed in range(10):
        m = run_checked(
            ScenarioSpec(n=4, f=1, votes={1: 1, 2: 0, 3: 1, 4: 0},
                         gst_time=0.5, pre_gst_spread=0.4, timeout=1.0, seed=seed)
        )
        assert m.decision is not None


def test_all_voters_agree_on_accepted_set():
    run = build_election(
        ScenarioSpec(n=4, f=1, votes={1: 1, 2: 0, 3: 1, 4: 1},
                     adversary={4: delay_all(0.3)}, timeout=1.0, seed=5)
    )
    run.sim.run()
    sets = set()
    for p in run.correct_ids():
        st = run.voters[p].elections[run.election_id]
        if st.emitted:
            sets.add(tuple(i for i in range(1, 5) if st.final_dec(i) == 1))
    assert len(sets) == 1


def test_double_cast_ignored():
    run = build_election(
        ScenarioSpec(n=4, f=1, votes={1: 1, 2: 1, 3: 1, 4: 1}, timeout=1.0)
    )
    run.sim.run(until=0.02)
    v1 = run.voters[1]
    st = v1.elections[run.election_id]
    assert st.vote_cast == 1
    v1._cast_ballot(st, 0)  # second cast is a no-op
    run.sim.run()
    assert v1.cast_votes[run.election_id] == 1
    m = run.metrics()
    assert m.decision.tally == 4


# ---- emergency mode ----

def test_emergency_unanimous_yes_decides_early_or_late_consistently():
    m = run_checked(
        ScenarioSpec(n=4, f=1, votes={i: 1 for i in range(1, 5)},
                     emergency=True, timeout=5.0, seed=1)
    )
    assert m.decision.approved


def test_emergency_early_beats_timeout_with_slow_voter():
    # one voter thinks past the timeout; the other three force approval at
    # the 3/4 frontier long before the close
    m = run_scenario(
        ScenarioSpec(n=4, f=1, votes={1: 1, 2: 1, 3: 1, 4: 1},
                     think_delays={4: 50.0}, emergency=True, timeout=100.0, seed=2),
        until=40.0,
    )
    assert m.decision is not None
    assert m.decision.mode == "EARLY"
    assert m.decision.approved
    assert m.model_time < 40.0


def test_emergency_split_falls_to_late():
    m = run_checked(
        ScenarioSpec(n=4, f=1, votes={1: 1, 2: 0, 3: 1, 4: 0},
                     emergency=True, timeout=1.0, seed=3)
    )
    assert m.decision is not None
    assert m.decision.mode in ("LATE", "EARLY")
    assert m.decision.approved  # 2 >= 4/2


def test_emergency_rejects_all_no():
    m = run_checked(
        ScenarioSpec(n=4, f=1, votes={i: 0 for i in range(1, 5)},
                     emergency=True, timeout=2.0, seed=4)
    )
    assert not m.decision.approved


# ---- delegation in elections ----

def test_inactive_voter_weight_delegated():
    m = run_checked(
        ScenarioSpec(
            n=4, f=1, votes={1: 1, 2: None, 3: 0, 4: 0},
            weights={1: 2, 2: 3, 3: 1, 4: 1}, threshold=Fraction(1, 2),
            delegation=[TrustEdge(2, 1, 9)], max_weight=Fraction(5, 7),
            inactive={2}, timeout=1.0, seed=6,
        )
    )
    # voter 1 now carries weight 5 and votes yes: 5 >= 7/2
    assert m.decision.tally == 5
    assert m.decision.weight_sum == 7  # delegated weight stays in the sum
    assert m.accepted == [1, 3, 4]
    assert m.decision.approved


def test_delegation_cap_blocks_super_voter():
    m = run_checked(
        ScenarioSpec(
            n=4, f=1, votes={1: 1, 2: None, 3: 0, 4: 0},
            weights={1: 2, 2: 3, 3: 1, 4: 1}, threshold=Fraction(1, 2),
            delegation=[TrustEdge(2, 1, 9)], max_weight=Fraction(3, 7),
            inactive={2}, timeout=1.0, seed=6,
        )
    )
    # 1 would hold 5/7 > 3/7: the delegation is refused, weight 3 is lost
    assert m.decision.tally == 2
    assert m.decision.weight_sum == 4


def test_fault_budget_enforced():
    with pytest.raises(ValueError):
        ScenarioSpec(
            n=4, f=1, votes={}, adversary={1: SILENT, 2: SILENT}
        ).validate()
