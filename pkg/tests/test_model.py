import json
import random

import pytest

from rcl.errors import ScenarioError
from rcl.model import (
    BaitSpec,
    ByzSpec,
    CorrectSpec,
    CrashSpec,
    Decide,
    DisagreeSpec,
    EquivocationProof,
    Malformed,
    PartitionSpec,
    Propose,
    RandomSpec,
    Relay,
    RoleKind,
    RoundRobinSpec,
    ScenarioConfig,
    SignatureScheme,
    SignedMessage,
    UtilityParams,
    Vote,
    body_from_wire,
    body_to_wire,
    canonical_json,
    detect_equivocation,
    make_config,
    message_from_wire,
    message_to_wire,
    valid_proof,
    valuation,
)


def test_sign_then_verify():
    scheme = SignatureScheme(seed=7)
    msg = scheme.sign(2, Vote(0, "v0"))
    assert scheme.verify(msg)
    assert msg.sender == 2
    assert len(msg.signature) == 64
    assert len(msg.digest) == 16


def test_verify_rejects_tampered_body():
    scheme = SignatureScheme(seed=7)
    msg = scheme.sign(2, Vote(0, "v0"))
    forged = SignedMessage(2, Vote(0, "v1"), msg.signature)
    assert not scheme.verify(forged)


def test_verify_rejects_wrong_sender():
    scheme = SignatureScheme(seed=7)
    msg = scheme.sign(2, Vote(0, "v0"))
    forged = SignedMessage(3, Vote(0, "v0"), msg.signature)
    assert not scheme.verify(forged)


def test_signing_is_deterministic_per_seed():
    a = SignatureScheme(seed=11).sign(1, Propose(2, "x"))
    b = SignatureScheme(seed=11).sign(1, Propose(2, "x"))
    c = SignatureScheme(seed=12).sign(1, Propose(2, "x"))
    assert a.signature == b.signature
    assert a.digest == b.digest
    assert a.signature != c.signature


def test_signer_is_bound_to_one_player():
    scheme = SignatureScheme(seed=3)
    signer = scheme.signer(4)
    msg = signer.sign(Vote(1, "v1"))
    assert msg.sender == 4
    assert scheme.verify(msg)


def test_equivocation_detected_on_conflicting_votes():
    scheme = SignatureScheme(seed=1)
    a = scheme.sign(0, Vote(3, "x"))
    b = scheme.sign(0, Vote(3, "y"))
    proof = detect_equivocation(scheme, a, b)
    assert proof is not None
    assert proof.culprit == 0
    assert valid_proof(scheme, proof)
    # proof orientation is canonical regardless of argument order
    again = detect_equivocation(scheme, b, a)
    assert again == proof


def test_equivocation_detected_on_conflicting_proposes():
    scheme = SignatureScheme(seed=1)
    a = scheme.sign(2, Propose(0, "x"))
    b = scheme.sign(2, Propose(0, "y"))
    assert detect_equivocation(scheme, a, b) is not None


def test_no_equivocation_across_rounds_kinds_or_senders():
    scheme = SignatureScheme(seed=1)
    v3x = scheme.sign(0, Vote(3, "x"))
    assert detect_equivocation(scheme, v3x, scheme.sign(0, Vote(4, "y"))) is None
    assert detect_equivocation(scheme, v3x, scheme.sign(0, Propose(3, "y"))) is None
    assert detect_equivocation(scheme, v3x, scheme.sign(1, Vote(3, "y"))) is None
    assert detect_equivocation(scheme, v3x, scheme.sign(0, Vote(3, "x"))) is None


def test_no_equivocation_from_forged_half():
    scheme = SignatureScheme(seed=1)
    real = scheme.sign(0, Vote(3, "x"))
    fake = SignedMessage(0, Vote(3, "y"), "0" * 64)
    assert detect_equivocation(scheme, real, fake) is None
    bogus = EquivocationProof(0, real, fake)
    assert not valid_proof(scheme, bogus)


def test_valid_proof_rejects_wrong_culprit():
    scheme = SignatureScheme(seed=1)
    proof = detect_equivocation(scheme, scheme.sign(0, Vote(3, "x")), scheme.sign(0, Vote(3, "y")))
    mislabeled = EquivocationProof(1, proof.first, proof.second)
    assert not valid_proof(scheme, mislabeled)


def test_utility_ordering_enforced():
    with pytest.raises(ScenarioError):
        UtilityParams(agree=10.0, disagree_gain=1.0)
    with pytest.raises(ScenarioError):
        UtilityParams(bait_reward=5.0)  # below disagree_gain
    with pytest.raises(ScenarioError):
        UtilityParams(slash=-1.0)  # above victim_penalty
    with pytest.raises(ScenarioError):
        UtilityParams(nonterm_penalty=0.5)
    with pytest.raises(ScenarioError):
        valuation("nope")
    assert valuation("alternate").disagree_gain == 50.0


def test_body_wire_round_trips():
    scheme = SignatureScheme(seed=5)
    vote = scheme.sign(1, Vote(0, "v0"))
    proof = detect_equivocation(scheme, scheme.sign(2, Vote(1, "a")), scheme.sign(2, Vote(1, "b")))
    bodies = [
        Propose(0, "v0"),
        Vote(4, "v1"),
        Decide("v0", (vote,)),
        Relay(vote),
        Malformed("junk17"),
    ]
    from rcl.model import DefaultMove, Expose

    bodies.append(Expose(proof))
    bodies.append(DefaultMove())
    for body in bodies:
        wire = body_to_wire(body)
        json.loads(canonical_json(wire))  # wire form is JSON clean
        assert body_from_wire(wire) == body


def test_message_wire_round_trip_preserves_digest():
    scheme = SignatureScheme(seed=5)
    msg = scheme.sign(3, Decide("v0", (scheme.sign(1, Vote(0, "v0")),)))
    back = message_from_wire(message_to_wire(msg))
    assert back == msg
    assert back.digest == msg.digest
    assert scheme.verify(back)


def test_make_config_defaults():
    cfg = make_config(5, 3)
    assert cfg.delta == 20
    assert cfg.fairness_window == 10
    assert cfg.round_window == 60
    assert cfg.max_rounds == 5
    assert cfg.horizon == 300
    assert cfg.values == ("v0", "v1", "v2", "v3", "v4")
    assert all(r.role == RoleKind.CORRECT for r in cfg.roles)


def test_role_kind_derived_from_strategy():
    cfg = make_config(
        4,
        3,
        k=1,
        t=1,
        strategies={1: CrashSpec(0, (0,)), 2: BaitSpec()},
        coalition=(2,),
    )
    assert cfg.role_of(1).role == RoleKind.CRASH
    assert cfg.role_of(2).role == RoleKind.RATIONAL
    assert cfg.players_of_kind(RoleKind.CORRECT) == [0, 3]


def test_config_budget_validation():
    with pytest.raises(ScenarioError):
        make_config(4, 3, strategies={1: CrashSpec(0, ())})  # t budget is 0
    with pytest.raises(ScenarioError):
        make_config(4, 3, strategies={1: BaitSpec()})  # k budget is 0
    with pytest.raises(ScenarioError):
        make_config(4, 3, k=1, coalition=(1,))  # 1 is not rational
    with pytest.raises(ScenarioError):
        make_config(4, 5)  # quorum larger than n
    with pytest.raises(ScenarioError):
        make_config(4, 3, strategies={1: ByzSpec(2)})  # t budget is 0
    with pytest.raises(ScenarioError):
        ByzSpec(7)


def test_config_wire_round_trip():
    cfg = make_config(
        5,
        3,
        seed=9,
        k=1,
        t=2,
        strategies={
            0: DisagreeSpec((1, 2), (3, 4), "v0", "v1"),
            3: CrashSpec(1, (0, 1)),
        },
        coalition=(0,),
        policy=PartitionSpec((0, 1, 2), (3, 4)),
        baiting=True,
    )
    back = ScenarioConfig.from_wire(cfg.to_wire())
    assert back == cfg
    assert back.digest() == cfg.digest()


def test_config_wire_round_trip_random_policy():
    cfg = make_config(3, 2, policy=RandomSpec(41), protocol="hardened")
    back = ScenarioConfig.from_wire(cfg.to_wire())
    assert back == cfg
    assert isinstance(back.policy, RandomSpec) and back.policy.seed == 41


def test_config_from_wire_rejects_garbage():
    with pytest.raises(ScenarioError):
        ScenarioConfig.from_wire({"n": 3})
    good = make_config(3, 2).to_wire()
    bad = dict(good, protocol="weird")
    with pytest.raises(ScenarioError):
        ScenarioConfig.from_wire(bad)


def test_canonical_json_is_stable_across_orderings():
    rng = random.Random(2024)
    for _ in range(200):
        items = [(f"k{i}", rng.randint(0, 99)) for i in range(8)]
        rng.shuffle(items)
        assert canonical_json(dict(items)) == canonical_json(dict(sorted(items)))


def test_policy_specs_have_stable_kinds():
    assert RoundRobinSpec().kind == "round_robin"
    assert CorrectSpec().kind == "correct"
    assert ByzSpec(4).kind == "byzantine"
