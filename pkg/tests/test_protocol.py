import pytest

from rcl.errors import InvalidBudget, NoImmuneQuorum
from rcl.model import Decide, Propose, SignatureScheme, Vote
from rcl.protocol import (
    PlayerState,
    cft_params,
    check_decision,
    default_params,
    immune_params,
)


def make_state(player, n, r, seed=0, value=None, punishment=False):
    scheme = SignatureScheme(seed)
    params = default_params(n, r, punishment=punishment)
    return PlayerState(player, params, scheme, scheme.signer(player), value or f"v{player}"), scheme


def test_cft_params_values():
    assert cft_params(4, 1).quorum_r == 3
    assert cft_params(5, 2).quorum_r == 3
    assert cft_params(9, 4).quorum_r == 5
    with pytest.raises(InvalidBudget):
        cft_params(4, 2)
    with pytest.raises(InvalidBudget):
        cft_params(5, 3)
    with pytest.raises(InvalidBudget):
        cft_params(1, 0)


def test_cft_quorum_is_largest_safe_choice():
    for n in range(2, 20):
        for t in range(0, n):
            try:
                r = cft_params(n, t).quorum_r
            except InvalidBudget:
                assert 2 * t >= n
                continue
            assert r == n - t
            assert 2 * r > n  # two quorums intersect
            assert r <= n - t  # t crashes cannot block it


def brute_immune_quorum(n, s):
    for r in range(1, n + 1):
        if 2 * r > n + s and r <= n - s:
            return r
    return None


def test_immune_params_against_brute_force():
    for n in range(2, 31):
        for s in range(0, 11):
            expected = brute_immune_quorum(n, s)
            if expected is None:
                with pytest.raises(NoImmuneQuorum):
                    immune_params(n, s)
                assert n <= 3 * s
            else:
                params = immune_params(n, s)
                assert params.quorum_r == expected
                assert params.punishment is True
                assert n > 3 * s


def test_immune_params_known_points():
    assert immune_params(7, 2).quorum_r == 5
    assert immune_params(4, 1).quorum_r == 3
    assert immune_params(10, 3).quorum_r == 7
    with pytest.raises(NoImmuneQuorum):
        immune_params(6, 2)


def test_round_and_leader_arithmetic():
    params = default_params(4, 3)
    assert params.round_window == 48
    assert params.round_of(0) == 0
    assert params.round_of(47) == 0
    assert params.round_of(48) == 1
    assert [params.leader(rho) for rho in range(6)] == [0, 1, 2, 3, 0, 1]


def vote_cert(scheme, senders, rho, value):
    return tuple(scheme.sign(s, Vote(rho, value)) for s in senders)


def test_check_decision_accepts_quorum():
    scheme = SignatureScheme(0)
    cert = vote_cert(scheme, [0, 1, 2], 1, "x")
    assert check_decision(scheme, "x", cert, 3) == 1


def test_check_decision_rejects_defects():
    scheme = SignatureScheme(0)
    good = vote_cert(scheme, [0, 1, 2], 1, "x")
    assert check_decision(scheme, "x", good[:2], 3) is None  # short
    assert check_decision(scheme, "y", good, 3) is None  # wrong value
    dup = (good[0], good[0], good[1])
    assert check_decision(scheme, "x", dup, 3) is None  # repeated sender
    mixed = good[:2] + vote_cert(scheme, [3], 2, "x")
    assert check_decision(scheme, "x", mixed, 3) is None  # mixed rounds
    other = SignatureScheme(99)
    forged = vote_cert(other, [0, 1, 2], 1, "x")
    assert check_decision(scheme, "x", forged, 3) is None  # bad signatures
    not_votes = (scheme.sign(0, Propose(1, "x")),) + good[1:]
    assert check_decision(scheme, "x", not_votes, 3) is None


def test_leader_proposes_and_votes_for_itself():
    state, scheme = make_state(0, 4, 3)
    out = state.act(now=0)
    bodies = [m.body for m, _ in out]
    assert bodies == [Propose(0, "v0"), Vote(0, "v0")]
    for msg, recipients in out:
        assert recipients == (1, 2, 3)
        assert scheme.verify(msg)
    assert state.proposed == {0} and state.voted == {0}


def test_follower_votes_after_leader_proposal():
    state, scheme = make_state(1, 4, 3)
    assert state.act(now=1) == []  # nothing to vote on yet
    state.ingest(scheme.sign(0, Propose(0, "v0")), now=4)
    out = state.act(now=5)
    assert [m.body for m, _ in out] == [Vote(0, "v0")]
    assert state.act(now=9) == []  # votes at most once per round


def test_follower_ignores_non_leader_proposal():
    state, scheme = make_state(1, 4, 3)
    state.ingest(scheme.sign(2, Propose(0, "v2")), now=4)
    assert state.act(now=5) == []


def test_quorum_of_votes_decides_and_broadcasts_once():
    state, scheme = make_state(3, 4, 3)
    state.ingest(scheme.sign(0, Propose(0, "v0")), now=3)
    state.ingest(scheme.sign(0, Vote(0, "v0")), now=3)
    state.ingest(scheme.sign(1, Vote(0, "v0")), now=7)
    out = state.act(now=7)  # own vote is the third
    kinds = [type(m.body).__name__ for m, _ in out]
    assert kinds == ["Vote", "Decide"]
    assert state.decided == "v0" and state.decided_round == 0
    decide = out[1][0].body
    assert check_decision(scheme, "v0", decide.justification, 3) == 0
    assert state.act(now=11) == []  # broadcast happens once


def test_decision_sticks_across_rounds():
    state, scheme = make_state(3, 4, 3)
    cert = vote_cert(scheme, [0, 1, 2], 0, "v0")
    state.ingest(scheme.sign(0, Decide("v0", cert)), now=50)
    assert state.decided == "v0"
    out = state.act(now=51)  # round 1 by now
    assert [type(m.body).__name__ for m, _ in out] == ["Decide"]
    # a later conflicting certificate does not overwrite the decision
    other = vote_cert(scheme, [0, 1, 2], 1, "v1")
    state.ingest(scheme.sign(1, Decide("v1", other)), now=60)
    assert state.decided == "v0"


def test_adoption_rejects_invalid_certificates():
    state, scheme = make_state(3, 4, 3)
    short = vote_cert(scheme, [0, 1], 0, "v0")
    state.ingest(scheme.sign(0, Decide("v0", short)), now=10)
    assert state.decided is None


def test_adoption_survives_exclusion_of_signers():
    state, scheme = make_state(3, 4, 3, punishment=True)
    state.apply_exclusion(0)
    cert = vote_cert(scheme, [0, 1, 2], 0, "v0")
    state.ingest(scheme.sign(1, Decide("v0", cert)), now=10)
    assert state.decided == "v0"


def test_exclusion_voids_recorded_votes_and_future_traffic():
    state, scheme = make_state(3, 4, 3)
    state.ingest(scheme.sign(0, Propose(0, "v0")), now=2)
    state.ingest(scheme.sign(0, Vote(0, "v0")), now=2)
    state.ingest(scheme.sign(1, Vote(0, "v0")), now=2)
    state.apply_exclusion(0)
    state.ingest(scheme.sign(0, Vote(0, "v0")), now=3)  # dropped
    out = state.act(now=3)
    # leader 0 is excluded so its proposal is void and no vote happens
    assert out == []
    assert (0, "v0") not in state.proposals.get(0, {})
    assert 0 not in state.votes.get((0, "v0"), {})
    assert 1 in state.votes.get((0, "v0"), {})


def test_forked_round_decides_deterministically():
    state, scheme = make_state(3, 4, 2)
    state.ingest(scheme.sign(0, Vote(0, "b"), ), now=1)
    state.ingest(scheme.sign(1, Vote(0, "b")), now=1)
    state.ingest(scheme.sign(1, Vote(0, "a")), now=2)
    state.ingest(scheme.sign(2, Vote(0, "a")), now=2)
    out = state.act(now=3)
    assert state.decided == "a"  # smallest value wins the tie
    assert [type(m.body).__name__ for m, _ in out] == ["Decide"]


def test_no_activity_after_round_budget():
    state, scheme = make_state(0, 4, 3)
    assert state.act(now=48 * 4) == []  # past max_rounds windows
    assert state.decided is None


def test_state_digest_tracks_content():
    a, scheme = make_state(2, 4, 3)
    b, _ = make_state(2, 4, 3)
    assert a.digest() == b.digest()
    a.ingest(scheme.sign(0, Vote(0, "v0")), now=1)
    assert a.digest() != b.digest()
    b.ingest(scheme.sign(0, Vote(0, "v0")), now=1)
    assert a.digest() == b.digest()


def test_own_quorum_preferred_over_arriving_certificate():
    # the player has already voted and holds a full quorum for "va"; a
    # conflicting certificate delivered in the same batch must not win
    state, scheme = make_state(2, 5, 3)
    state.ingest(scheme.sign(0, Propose(0, "va")), now=2)
    state.ingest(scheme.sign(0, Vote(0, "va")), now=2)
    state.act(now=2)  # casts own vote, quorum not yet complete
    assert state.decided is None
    state.ingest(scheme.sign(3, Vote(0, "va")), now=7)
    foreign = vote_cert(scheme, [0, 3, 4], 0, "vb")
    state.ingest(scheme.sign(4, Decide("vb", foreign)), now=7)
    assert state.decided == "va"


def test_without_own_quorum_certificate_adopts():
    state, scheme = make_state(2, 5, 3)
    foreign = vote_cert(scheme, [0, 3, 4], 0, "vb")
    state.ingest(scheme.sign(4, Decide("vb", foreign)), now=7)
    assert state.decided == "vb"
