"""Kernel: rule schemas, side conditions, mutation rejection, soundness."""

import random

import pytest

from muwb.generators import random_model
from muwb.kernel import (
    CONTEXT_NOT_SUBSET,
    NONEMPTY_CONTEXT,
    NOT_IN_CONTEXT,
    PREMISE_COUNT,
    WRONG_CONCLUSION,
    WRONG_HYPOTHESES,
    BoxI,
    Derivation,
    FfE,
    FfI,
    Hyp,
    ImpE,
    ImpI,
    K,
    KernelError,
    MuE,
    MuI,
    NotI,
    Raa,
    Sequent,
    Weaken,
    check,
    derive_nu_unfold_test_corpus,
    sequent,
)
from muwb.semantics import consequence
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
    WellFormednessError,
    free_vars,
    mk_wf,
)

P = mk_wf(Atom(AtomicId("P")))
Q = mk_wf(Atom(AtomicId("Q")))
FF = mk_wf(Ff())
A = ActionId("a")
X = Variable("x")

LEMMA_MU = mk_wf(Mu(X, Imp(P.prp, Var(X))))
LEMMA_HYP = mk_wf(Imp(P.prp, LEMMA_MU.prp))


def transcript_lemma() -> Derivation:
    """{P -> mu x . P -> x} |- mu x . P -> x via fixpoint introduction."""
    return Derivation(
        MuI(),
        (Derivation(Hyp(), (), sequent([LEMMA_HYP], LEMMA_HYP)),),
        sequent([LEMMA_HYP], LEMMA_MU),
    )


def test_hyp_accepts():
    assert check(Derivation(Hyp(), (), sequent([P], P))) == sequent([P], P)


def test_transcript_lemma_accepted():
    d = transcript_lemma()
    assert check(d) == sequent([LEMMA_HYP], LEMMA_MU)


def test_transcript_lemma_alpha_renamed():
    y = Variable("y")
    mu = mk_wf(Mu(y, Imp(P.prp, Var(y))))
    hyp = mk_wf(Imp(P.prp, mu.prp))
    d = Derivation(
        MuI(),
        (Derivation(Hyp(), (), sequent([hyp], hyp)),),
        sequent([LEMMA_HYP], LEMMA_MU),  # conclusion spelled with x, premises with y
    )
    assert check(d) == sequent([LEMMA_HYP], LEMMA_MU)


def test_corpus_has_all_rules_and_checks():
    corpus = derive_nu_unfold_test_corpus()
    assert len(corpus) >= 12
    seen = {type(d.rule).__name__ for d, _ in corpus}
    assert seen >= {
        "Hyp", "Raa", "ImpI", "ImpE", "NotI", "FfI",
        "FfE", "BoxI", "K", "MuI", "MuE", "Weaken",
    }
    for d, expected in corpus:
        assert check(d) == expected


def test_weaken_monotone_acceptance():
    corpus = derive_nu_unfold_test_corpus()
    extra = mk_wf(Atom(AtomicId("Extra")))
    for d, seq in corpus:
        widened = Sequent(seq.hyps | {extra}, seq.concl)
        assert check(Derivation(Weaken(), (d,), widened)) == widened


def test_error_carries_path():
    bad_leaf = Derivation(Hyp(), (), sequent([], P))
    d = Derivation(
        ImpI(),
        (Derivation(Hyp(), (), sequent([P], P)),),
        sequent([], mk_wf(Imp(P.prp, P.prp))),
    )
    outer = Derivation(Weaken(), (Derivation(Weaken(), (bad_leaf,), sequent([Q], P)),), sequent([Q, P], P))
    with pytest.raises(KernelError) as exc:
        check(outer)
    assert exc.value.path == (0, 0)
    assert exc.value.reason == NOT_IN_CONTEXT
    assert check(d)


# ------------------------------------------------------------ mutation suite

def expect_rejection(d: Derivation, reason: str):
    with pytest.raises(KernelError) as exc:
        check(d)
    assert exc.value.reason == reason, exc.value


def test_mutation_hyp_not_in_context():
    expect_rejection(Derivation(Hyp(), (), sequent([Q], P)), NOT_IN_CONTEXT)


def test_mutation_box_i_nonempty_context():
    boxed = mk_wf(Box(A, P.prp))
    d = Derivation(
        BoxI(A),
        (Derivation(Hyp(), (), sequent([P], P)),),
        sequent([P], boxed),
    )
    expect_rejection(d, NONEMPTY_CONTEXT)


def test_mutation_mu_e_extra_hypothesis():
    mu_bot = mk_wf(Mu(X, Var(X)))
    d = Derivation(
        MuE(mu=mu_bot),
        (
            Derivation(Hyp(), (), sequent([mu_bot], mu_bot)),
            Derivation(Hyp(), (), sequent([Q, P], Q)),  # smuggled extra hypothesis
        ),
        sequent([mu_bot], Q),
    )
    expect_rejection(d, WRONG_HYPOTHESES)


def test_mutation_mu_i_wrong_unfolding():
    wrong = mk_wf(Imp(Q.prp, LEMMA_MU.prp))  # antecedent is not the binder body's
    d = Derivation(
        MuI(),
        (Derivation(Hyp(), (), sequent([wrong], wrong)),),
        sequent([wrong], LEMMA_MU),
    )
    expect_rejection(d, WRONG_CONCLUSION)


def test_mutation_ill_formed_mu_cannot_enter():
    with pytest.raises(WellFormednessError):
        mk_wf(Mu(X, Not(Var(X))))


def test_mutation_raa_missing_negated_hypothesis():
    d = Derivation(
        Raa(),
        (Derivation(Hyp(), (), sequent([FF], FF)),),
        sequent([FF], P),  # premise context lacks ~P
    )
    expect_rejection(d, WRONG_HYPOTHESES)


def test_mutation_imp_i_wrong_antecedent():
    goal = mk_wf(Imp(P.prp, Q.prp))
    d = Derivation(
        ImpI(),
        (Derivation(Hyp(), (), sequent([Q], Q)),),  # added Q, not the antecedent P
        sequent([], goal),
    )
    expect_rejection(d, WRONG_HYPOTHESES)


def test_mutation_imp_e_cut_mismatch():
    p_imp_q = mk_wf(Imp(P.prp, Q.prp))
    ctx = [P, p_imp_q]
    d = Derivation(
        ImpE(cut=Q),  # cut disagrees with the major premise
        (
            Derivation(Hyp(), (), sequent(ctx, p_imp_q)),
            Derivation(Hyp(), (), sequent(ctx, P)),
        ),
        sequent(ctx, Q),
    )
    expect_rejection(d, WRONG_CONCLUSION)


def test_mutation_ff_i_unnegated_pair():
    ctx = [P, Q]
    d = Derivation(
        FfI(cut=P),
        (
            Derivation(Hyp(), (), sequent(ctx, P)),
            Derivation(Hyp(), (), sequent(ctx, Q)),  # not the negation of the cut
        ),
        sequent(ctx, FF),
    )
    expect_rejection(d, WRONG_CONCLUSION)


def test_mutation_ff_e_premise_not_ff():
    d = Derivation(
        FfE(),
        (Derivation(Hyp(), (), sequent([P], P)),),
        sequent([P], Q),
    )
    expect_rejection(d, WRONG_CONCLUSION)


def test_mutation_k_wrong_action():
    b = ActionId("b")
    p_imp_q = mk_wf(Imp(P.prp, Q.prp))
    box_imp = mk_wf(Box(A, p_imp_q.prp))
    box_p = mk_wf(Box(A, P.prp))
    ctx = [box_imp, box_p]
    d = Derivation(
        K(action=A, cut=P),
        (
            Derivation(Hyp(), (), sequent(ctx, box_imp)),
            Derivation(Hyp(), (), sequent(ctx, box_p)),
        ),
        sequent(ctx, mk_wf(Box(b, Q.prp))),  # conclusion uses the wrong action
    )
    expect_rejection(d, "shape_mismatch")


def test_mutation_weaken_not_superset():
    d = Derivation(
        Weaken(),
        (Derivation(Hyp(), (), sequent([P, Q], P)),),
        sequent([P], P),  # conclusion context is smaller than the premise's
    )
    expect_rejection(d, CONTEXT_NOT_SUBSET)


def test_mutation_premise_count():
    expect_rejection(Derivation(MuI(), (), sequent([LEMMA_HYP], LEMMA_MU)), PREMISE_COUNT)


def test_mutation_mu_e_first_premise_wrong_formula():
    mu_bot = mk_wf(Mu(X, Var(X)))
    other_mu = mk_wf(Mu(X, Imp(P.prp, Var(X))))
    d = Derivation(
        MuE(mu=mu_bot),
        (
            Derivation(Hyp(), (), sequent([other_mu], other_mu)),
            Derivation(Hyp(), (), sequent([Q], Q)),
        ),
        sequent([other_mu], Q),
    )
    expect_rejection(d, WRONG_CONCLUSION)


# ----------------------------------------------------- empirical soundness

def test_corpus_sound_on_random_models_quick():
    # the 200-model battery is acceptance criterion 6; a 20-model spot check here
    rng = random.Random(31)
    corpus = derive_nu_unfold_test_corpus()
    atoms = [AtomicId("P"), AtomicId("Q"), AtomicId("Extra")]
    actions = [A, ActionId("b")]
    for _ in range(20):
        ts = random_model(rng, atoms, actions, 4)
        for _, seq in corpus:
            assert consequence(ts, seq.hyps, seq.concl), seq


def test_battery_detects_unsound_sequent():
    # what a kernel with a skipped box-side-condition would emit: {} |- [a]P
    rng = random.Random(32)
    bogus = sequent([], mk_wf(Box(A, P.prp)))
    found = False
    for _ in range(50):
        ts = random_model(rng, [AtomicId("P")], [A], 4)
        if not consequence(ts, bogus.hyps, bogus.concl):
            found = True
            break
    assert found
