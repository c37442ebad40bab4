import pytest

from litmus_axiom.catdsl import (
    Evaluator,
    ModelSyntaxError,
    RecursiveBinding,
    UnknownIdentifier,
    eval_model,
    parse_model,
)
from litmus_axiom.events import W, R, Witness, Wna, Execution, Location, base_env
from litmus_axiom.relalg import Relation

X = Location("x", True)


def sb_exec():
    x = Execution.from_threads([Wna(X, 0)], [[W(X, 1)], [R(X, 0)]])
    rf = Relation.from_pairs(3, [(0, 2)])
    mo = Relation.from_pairs(3, [(0, 1)])
    return x, Witness(rf, mo)


def ev(expr: str, x=None, w=None):
    x, w = (x, w) if x else sb_exec()
    m = parse_model(f"let v = {expr}\n")
    env = base_env(x, w)
    return m.bindings[0].expr.eval(env)


class TestParsing:
    def test_statements(self):
        m = parse_model(
            """
            # comment
            let fr = rf^-1 ; mo
            acyclic (sb | rf |
                     fr) as Order
            irreflexive fr as Irr
            empty fr & sb as Nothing
            undefined_unless empty fr as Ub
            """
        )
        assert [b.name for b in m.bindings] == ["fr"]
        assert [c.name for c in m.consistency()] == ["Order", "Irr", "Nothing"]
        assert [c.name for c in m.undefined()] == ["Ub"]
        assert not m.needs_S

    def test_witness_declaration(self):
        m = parse_model("witness S linear over SC\nirreflexive S ; sb as S1\n")
        assert m.needs_S and m.witness_name == "S"

    def test_primes_and_hyphens_in_names(self):
        m = parse_model("let rs' = sb\nlet new-incl = rs' | rs'\n")
        assert [b.name for b in m.bindings] == ["rs'", "new-incl"]

    @pytest.mark.parametrize(
        "text,exc",
        [
            ("let a = nope\n", UnknownIdentifier),
            ("let a = a | sb\n", RecursiveBinding),
            ("let a = sb\nlet a = rf\n", ModelSyntaxError),
            ("acyclic sb\n", ModelSyntaxError),
            ("acyclic sb as A\nacyclic rf as A\n", ModelSyntaxError),
            ("let a = sb ; R\n", ModelSyntaxError),
            ("let a = R * sb\n", ModelSyntaxError),
            ("let a = R | sb\n", ModelSyntaxError),
            ("let a = [sb]\n", ModelSyntaxError),
            ("let a = R+\n", ModelSyntaxError),
            ("acyclic R as A\n", ModelSyntaxError),
            ("let a = (sb\n", ModelSyntaxError),
            ("let a = sb $ rf\n", ModelSyntaxError),
            ("witness S linear over SC\nwitness T linear over SC\n", ModelSyntaxError),
            ("witness S linear over sb\n", ModelSyntaxError),
        ],
    )
    def test_errors(self, text, exc):
        with pytest.raises(exc):
            parse_model(text)

    def test_error_position(self):
        with pytest.raises(UnknownIdentifier) as info:
            parse_model("let a = sb\nlet b = a | zz\n")
        assert info.value.line == 2 and info.value.col == 13


class TestSemantics:
    def test_precedence_union_loosest(self):
        # sb | rf & mo  ==  sb | (rf & mo)
        assert ev("sb | rf & mo") == ev("sb | (rf & mo)")

    def test_precedence_diff_between_union_and_inter(self):
        assert ev("sb \\ rf | mo") == ev("(sb \\ rf) | mo")
        assert ev("sb \\ rf & mo") == ev("sb \\ (rf & mo)")

    def test_precedence_seq_tighter_than_inter(self):
        assert ev("rf ; mo & sb") == ev("(rf ; mo) & sb")

    def test_product_tighter_than_seq(self):
        assert ev("sb ; W * R") == ev("sb ; (W * R)")

    def test_postfix_tighter_than_complement(self):
        assert ev("~sb^-1") == ev("~(sb^-1)")

    def test_left_associative(self):
        assert ev("E2 \\ sb \\ rf") == ev("(E2 \\ sb) \\ rf")

    def test_operators(self):
        x, w = sb_exec()
        assert ev("rf^-1 ; mo") == Relation.from_pairs(3, [(2, 1)])
        assert ev("[W]") == Relation.from_pairs(3, [(0, 0), (1, 1)])
        assert ev("(rf | mo)+") == Relation.from_pairs(3, [(0, 2), (0, 1)])
        assert ev("mo?") == Relation.from_pairs(3, [(0, 1), (0, 0), (1, 1), (2, 2)])
        assert set(ev("W & ~I")) == {1}

    def test_empty_on_sets(self):
        x, w = sb_exec()
        m = parse_model("empty R & W as NoRmw\nempty R as NoReads\n")
        v = eval_model(m, x, w)
        assert v.failed_axioms == ("NoReads",)

    def test_verdict_faulty_only_when_consistent(self):
        x, w = sb_exec()
        m = parse_model("undefined_unless empty rf as U\n")
        assert eval_model(m, x, w).faulty
        m2 = parse_model("empty rf as C\nundefined_unless empty rf as U\n")
        v = eval_model(m2, x, w)
        assert not v.consistent and not v.faulty and v.ub_axioms == ()

    def test_evaluator_matches_eval_model(self):
        x, w = sb_exec()
        m = parse_model("let fr = rf^-1 ; mo\nlet s = sb\nacyclic s | fr | rf as A\nirreflexive fr as B\n")
        e = Evaluator(m, x)
        assert [b.name for b in e.static_bindings] == ["s"]
        assert e.verdict(e.stage(w.rf, w.mo)) == eval_model(m, x, w)

    def test_witness_staging(self):
        x, w = sb_exec()
        m = parse_model("witness S linear over SC\nlet t = S ; sb\nirreflexive S ; rf as A\nacyclic t as B\n")
        e = Evaluator(m, x)
        assert [c.name for c in e.s_constraints] == ["A", "B"]
        assert e.rfmo_constraints == []
        assert [b.name for b in e.s_bindings] == ["t"]
        env = e.stage(w.rf, w.mo)
        assert set(e.witness_set(env)) == {1, 2}
        for order in ([1, 2], [2, 1]):
            S = Relation.from_order(3, order)
            staged = e.verdict(e.stage_S(env, S))
            assert staged == eval_model(m, x, Witness(w.rf, w.mo, S))
