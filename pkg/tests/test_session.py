"""Goal-directed engine: tactics, undo, qed, applicability, fuzzing."""

import random

import pytest

from muwb import session as ses
from muwb.kernel import check, sequent
from muwb.session import (
    Assumption,
    BoxI,
    FfE,
    FfI,
    GoalState,
    ImpE,
    Intro,
    KRule,
    MuE,
    MuI,
    NotI,
    OpenGoalsRemain,
    ProofSession,
    Qed,
    Raa,
    SessionError,
    TacticError,
    Undo,
    Weaken,
    applicable,
    apply_tactic,
    new_session,
    qed,
    replay,
)
from muwb.syntax import (
    ActionId,
    Atom,
    AtomicId,
    Box,
    Ff,
    Imp,
    Mu,
    Not,
    Var,
    Variable,
    mk_wf,
)

P = mk_wf(Atom(AtomicId("P")))
Q = mk_wf(Atom(AtomicId("Q")))
A = ActionId("a")
X = Variable("x")

LEMMA_MU = mk_wf(Mu(X, Imp(P.prp, Var(X))))
LEMMA_HYP = mk_wf(Imp(P.prp, LEMMA_MU.prp))
TRANSCRIPT_CLAIM = sequent([], mk_wf(Imp(LEMMA_HYP.prp, LEMMA_MU.prp)))


def test_new_session_single_goal():
    s = new_session(sequent([P], P))
    assert len(s.goals) == 1
    assert s.goals[0].sequent() == sequent([P], P)


def test_transcript_replay_three_steps():
    s = new_session(TRANSCRIPT_CLAIM, "simple")
    s = apply_tactic(s, Intro())
    assert s.goals[0].sequent() == sequent([LEMMA_HYP], LEMMA_MU)
    s = apply_tactic(s, MuI())
    # eager substitution: the unfolded goal is exactly the hypothesis
    assert s.goals[0].concl == LEMMA_HYP
    s = apply_tactic(s, Assumption())
    assert s.proved
    derivation = qed(s)
    assert check(derivation) == TRANSCRIPT_CLAIM
    assert len(s.tactic_log) == 3


def test_tactic_failure_atomic():
    s = new_session(sequent([P], P))
    before = s
    with pytest.raises(TacticError):
        apply_tactic(s, MuI())
    assert s is before and s.goals[0].sequent() == sequent([P], P)


def test_mu_i_on_non_mu_goal():
    s = new_session(sequent([], mk_wf(Imp(P.prp, P.prp))))
    with pytest.raises(TacticError) as exc:
        apply_tactic(s, MuI())
    assert exc.value.reason == "shape_mismatch"


def test_undo_restores_exact_state():
    s0 = new_session(TRANSCRIPT_CLAIM)
    s1 = apply_tactic(s0, Intro())
    assert apply_tactic(s1, Undo()) is s0


def test_undo_on_empty_history():
    s = new_session(sequent([P], P))
    with pytest.raises(TacticError) as exc:
        apply_tactic(s, Undo())
    assert exc.value.reason == "empty_history"


def test_box_i_empties_context():
    s = new_session(sequent([Q], mk_wf(Box(A, Imp(P.prp, P.prp)))))
    s = apply_tactic(s, BoxI())
    assert s.goals[0].hyps == ()
    s = apply_tactic(s, Intro())
    s = apply_tactic(s, Assumption())
    assert check(qed(s)) == sequent([Q], mk_wf(Box(A, Imp(P.prp, P.prp))))


def test_mu_e_pushes_fixpoint_goal_first():
    mu_bot = mk_wf(Mu(X, Var(X)))
    s = new_session(sequent([mu_bot], Q))
    s = apply_tactic(s, MuE(mu_bot))
    assert s.goals[0].concl == mu_bot
    assert s.goals[1].hyps == (Q,)
    s = apply_tactic(s, Assumption())
    s = apply_tactic(s, Assumption())
    assert check(qed(s)) == sequent([mu_bot], Q)


def test_k_rule_and_weaken():
    p_imp_q = mk_wf(Imp(P.prp, Q.prp))
    box_imp = mk_wf(Box(A, p_imp_q.prp))
    box_p = mk_wf(Box(A, P.prp))
    box_q = mk_wf(Box(A, Q.prp))
    claim = sequent([box_imp, box_p, Q], box_q)
    s = new_session(claim)
    s = apply_tactic(s, Weaken((box_imp, box_p)))
    s = apply_tactic(s, KRule(P))
    s = apply_tactic(s, Assumption())
    s = apply_tactic(s, Assumption())
    assert check(qed(s)) == claim


def test_raa_not_i_ff_i_ff_e_round():
    # {~~P} |- P by contradiction
    not_p = mk_wf(Not(P.prp))
    not_not_p = mk_wf(Not(not_p.prp))
    s = new_session(sequent([not_not_p], P))
    s = apply_tactic(s, Raa())
    s = apply_tactic(s, FfI(not_p))
    s = apply_tactic(s, Assumption())
    s = apply_tactic(s, Assumption())
    assert check(qed(s)) == sequent([not_not_p], P)


def test_ff_e_then_assumption():
    ff = mk_wf(Ff())
    s = new_session(sequent([ff], Q))
    s = apply_tactic(s, FfE())
    s = apply_tactic(s, Assumption())
    assert check(qed(s)) == sequent([ff], Q)


def test_not_i():
    s = new_session(sequent([], mk_wf(Not(Ff()))))
    s = apply_tactic(s, NotI())
    s = apply_tactic(s, Assumption())
    assert qed(s)


def test_imp_e():
    p_imp_q = mk_wf(Imp(P.prp, Q.prp))
    claim = sequent([P, p_imp_q], Q)
    s = new_session(claim)
    s = apply_tactic(s, ImpE(P))
    s = apply_tactic(s, Assumption())
    s = apply_tactic(s, Assumption())
    assert check(qed(s)) == claim


def test_qed_with_open_goals():
    s = new_session(sequent([P], P))
    with pytest.raises(OpenGoalsRemain):
        qed(s)


def test_qed_tactic_bookkeeping():
    s = new_session(sequent([P], P))
    with pytest.raises(TacticError):
        apply_tactic(s, Qed())
    s = apply_tactic(s, Assumption())
    assert apply_tactic(s, Qed()) is s


def test_session_consumed():
    session = ProofSession(sequent([P], P))
    session.apply(Assumption())
    session.qed()
    with pytest.raises(SessionError):
        session.qed()


def test_hypothesis_labels():
    s = new_session(TRANSCRIPT_CLAIM)
    s = apply_tactic(s, Intro())
    goal = s.goals[0]
    assert goal.labels() == ["H"]
    s2 = apply_tactic(s, Raa())
    assert s2.goals[0].labels() == ["H", "H0"]


def test_replay_transcript_script():
    class Script:
        name = "simple"
        claim = TRANSCRIPT_CLAIM
        tactics = (Intro(), MuI(), Assumption())

    derivation = replay(Script())
    assert check(derivation) == TRANSCRIPT_CLAIM


def test_replay_permuted_fails_with_step():
    class Script:
        name = "broken"
        claim = TRANSCRIPT_CLAIM
        tactics = (MuI(), Intro(), Assumption())

    with pytest.raises(ses.ReplayError) as exc:
        replay(Script())
    assert exc.value.step == 0


def test_replay_empty_script_fails_at_qed():
    class Script:
        name = "empty"
        claim = TRANSCRIPT_CLAIM
        tactics = ()

    with pytest.raises(ses.ReplayError) as exc:
        replay(Script())
    assert exc.value.step == 0 and isinstance(exc.value.cause, OpenGoalsRemain)


# ------------------------------------------------------------- applicability

def test_applicable_on_mu_goal():
    s = new_session(sequent([LEMMA_HYP], LEMMA_MU))
    info = {i.name: i for i in applicable(s)}
    assert info["mu_i"].applicable
    assert not info["intro"].applicable and info["intro"].reason
    assert info["raa"].applicable
    assert not info["qed"].applicable


def test_applicable_never_lies():
    # every tactic listed applicable must apply without a shape error
    mu_bot = mk_wf(Mu(X, Var(X)))
    rng = random.Random(41)
    states = [
        new_session(TRANSCRIPT_CLAIM),
        new_session(sequent([P], mk_wf(Box(A, P.prp)))),
        new_session(sequent([mk_wf(Ff())], mk_wf(Ff()))),
        new_session(sequent([mu_bot], Q)),
        new_session(sequent([], mk_wf(Not(Ff())))),
    ]
    args = {
        "ff_i": FfI(P),
        "imp_e": ImpE(P),
        "k": KRule(P),
        "mu_e": MuE(mu_bot),
    }
    def as_tactic(name, state):
        if name == "weaken":
            return Weaken(tuple(state.goals[0].hyps))
        return args.get(name) or _nullary(name)

    for s in states:
        for depth in range(6):
            infos = [i for i in applicable(s) if i.applicable and i.name not in ("undo", "qed")]
            if not infos:
                break
            for info in infos:
                apply_tactic(s, as_tactic(info.name, s))  # must not raise
            s = apply_tactic(s, as_tactic(rng.choice(infos).name, s))


def _nullary(name):
    return {
        "assumption": Assumption(),
        "intro": Intro(),
        "raa": Raa(),
        "not_i": NotI(),
        "ff_e": FfE(),
        "box_i": BoxI(),
        "mu_i": MuI(),
    }[name]


def test_fuzz_qed_always_kernel_checked():
    """Random applicable-tactic walks: whenever all goals close, qed passes."""
    rng = random.Random(42)
    mu_bot = mk_wf(Mu(X, Var(X)))
    claims = [
        sequent([P], P),
        TRANSCRIPT_CLAIM,
        sequent([mu_bot], Q),
        sequent([P, mk_wf(Imp(P.prp, Q.prp))], Q),
        sequent([], mk_wf(Imp(P.prp, P.prp))),
        sequent([Q], mk_wf(Box(A, Imp(P.prp, P.prp)))),
    ]
    args = {
        "ff_i": lambda s: FfI(P),
        "imp_e": lambda s: ImpE(P),
        "k": lambda s: KRule(P),
        "mu_e": lambda s: MuE(mu_bot),
        "weaken": lambda s: Weaken(tuple(s.goals[0].hyps)),
    }
    completed = 0
    for trial in range(300):
        s = new_session(rng.choice(claims))
        for _ in range(8):
            if s.proved:
                derivation = qed(s)  # must not raise
                assert check(derivation) == s.claim
                completed += 1
                break
            infos = [i for i in applicable(s) if i.applicable and i.name not in ("undo", "qed")]
            names = [i.name for i in infos]
            # lean toward closing goals so walks finish often enough to exercise qed
            if "assumption" in names and rng.random() < 0.6:
                pick_name = "assumption"
            else:
                pick_name = rng.choice(names)
            builder = args.get(pick_name)
            tac = builder(s) if builder else _nullary(pick_name)
            s = apply_tactic(s, tac)
    assert completed > 20
