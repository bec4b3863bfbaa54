"""Static semantics: expression/statement/declaration rules, compile-time
evaluation, type normalization and equality."""

import pytest

from pcore import typecheck
from pcore.errors import (
    DuplicateEnumMember, MissingReturn, NotCompileTime, TypeError_,
)
from pcore.parser import (
    parse_expression, parse_program, parse_statement, parse_type,
)
from pcore.syntax import (
    BitT, BoolT, BoolV, EnumT, ErrorT, FunT, IntT, IntV, MatchKindT, Param,
    RecordT, StackT, VarT, VOID, type_equal,
)


def chk(text, **initial):
    return typecheck.check_program(parse_program(text), **initial)


def expr(text, gamma=None, sigma=None, delta=None):
    return typecheck.check_expression(
        sigma or {}, gamma or {}, delta or typecheck.initial_delta(),
        parse_expression(text),
    )


class TestTypeEqual:
    def test_alpha_renaming(self):
        f1 = FunT(("X",), (Param("in", "a", VarT("X")),), VarT("X"))
        f2 = FunT(("Y",), (Param("in", "b", VarT("Y")),), VarT("Y"))
        assert type_equal(f1, f2)

    def test_open_enums_compare_by_kind(self):
        assert ErrorT(("A",)) == ErrorT(("B",))
        assert MatchKindT(("x",)) == MatchKindT(())
        assert not type_equal(ErrorT(()), MatchKindT(()))

    def test_structural_inequality(self):
        assert not type_equal(BitT(8), BitT(9))
        assert not type_equal(RecordT((("a", BitT(8)),)),
                              RecordT((("b", BitT(8)),)))


class TestSimplify:
    def test_width_expression(self):
        t = parse_type("bit<4 + 4>")
        assert typecheck.simplify_type({}, typecheck.initial_delta(), t) == BitT(8)

    def test_width_from_const(self):
        sigma, gamma, delta = chk("const int w = 16;\nbit<w> x := 0w16;")
        assert gamma["x"] == BitT(16)

    def test_zero_width_rejected(self):
        with pytest.raises(TypeError_):
            chk("bit<0> x := 0w1;")

    def test_typedef_chain(self):
        sigma, gamma, delta = chk(
            "typedef bit<8> byte;\ntypedef byte octet;\noctet x := 1w8;"
        )
        assert gamma["x"] == BitT(8)

    def test_unbound_type_var(self):
        with pytest.raises(TypeError_):
            chk("Mystery x := 1w8;")


class TestCteval:
    def test_arith(self):
        assert typecheck.cteval({}, parse_expression("2 + 3 * 4")) == \
            IntV(14, None)

    def test_const_lookup(self):
        assert typecheck.cteval({"c": IntV(5, None)},
                                parse_expression("c * c")) == IntV(25, None)

    def test_not_compile_time(self):
        with pytest.raises(NotCompileTime):
            typecheck.cteval({}, parse_expression("x + 1"))


class TestExpressions:
    def test_literal_width_check(self):
        with pytest.raises(TypeError_):
            expr("9w3")

    def test_var_direction(self):
        te = expr("x", gamma={"x": BitT(8)})
        assert te.direction == "inout"

    def test_const_direction(self):
        te = expr("c", gamma={"c": BitT(8)}, sigma={"c": IntV(1, 8)})
        assert te.direction == "in"

    def test_member_preserves_direction(self):
        g = {"r": RecordT((("a", BitT(4)),))}
        assert expr("r.a", gamma=g).direction == "inout"

    def test_index_requires_bit32(self):
        g = {"s": StackT(BitT(8), 2)}
        assert expr("s[0w32]", gamma=g).type == BitT(8)
        with pytest.raises(TypeError_):
            expr("s[0w16]", gamma=g)
        with pytest.raises(TypeError_):
            expr("s[0]", gamma=g)

    def test_slice_bounds(self):
        g = {"x": BitT(8)}
        assert expr("x[7:4]", gamma=g).type == BitT(4)
        with pytest.raises(TypeError_):
            expr("x[8:0]", gamma=g)
        with pytest.raises(TypeError_):
            expr("x[2:5]", gamma=g)

    def test_slice_endpoints_compile_time(self):
        g = {"x": BitT(8), "i": IntT()}
        with pytest.raises(TypeError_):
            expr("x[i:0]", gamma=g)

    def test_enum_member(self):
        d = typecheck.initial_delta().bind("E", EnumT("E", ("a", "b")))
        assert expr("E.a", delta=d).type == EnumT("E", ("a", "b"))
        with pytest.raises(TypeError_):
            expr("E.zz", delta=d)

    def test_error_member(self):
        te = expr("error.NoError")
        assert te.type == ErrorT(("NoError",))

    def test_enum_name_is_not_a_value(self):
        d = typecheck.initial_delta().bind("E", EnumT("E", ("a",)))
        with pytest.raises(TypeError_):
            expr("E", delta=d)

    def test_record_literal(self):
        te = expr("{a = 1w8, b = true}")
        assert te.type == RecordT((("a", BitT(8)), ("b", BoolT())))

    def test_div_requires_compile_time_divisor(self):
        g = {"x": BitT(8), "y": BitT(8)}
        assert expr("x / 3w8", gamma=g).type == BitT(8)
        with pytest.raises(TypeError_):
            expr("x / y", gamma=g)
        with pytest.raises(TypeError_):
            expr("x / 0w8", gamma=g)

    def test_int_shift_amount_compile_time_nonneg(self):
        g = {"x": BitT(8), "i": IntT()}
        assert expr("x << 2", gamma=g).type == BitT(8)
        with pytest.raises(TypeError_):
            expr("x << i", gamma=g)
        with pytest.raises(TypeError_):
            expr("x << -1", gamma=g)

    def test_bit_shift_amount_dynamic_ok(self):
        g = {"x": BitT(8), "y": BitT(4)}
        assert expr("x >> y", gamma=g).type == BitT(8)


class TestStatements:
    def test_assign_needs_inout(self):
        with pytest.raises(TypeError_):
            chk("const bit<8> c = 1w8;\n{} f() {c := 2w8;}")

    def test_assign_type_mismatch(self):
        with pytest.raises(TypeError_):
            chk("bit<8> x := 1w8;\n{} f() {x := true;}")

    def test_block_scoping(self):
        # inner declarations do not leak
        with pytest.raises(TypeError_):
            chk("{} f() {{bit<8> y := 1w8;} y := 2w8;}")

    def test_shadowing_const(self):
        sigma, gamma, delta = chk(
            "const bit<8> c = 1w8;\n"
            "bit<8> f() {bit<8> c := 2w8; c := 3w8; return c;}"
        )
        assert sigma["c"] == IntV(1, 8)

    def test_no_type_decls_in_blocks(self):
        with pytest.raises(TypeError_):
            chk("{} f() {enum E {a} exit;}")

    def test_return_type_checked(self):
        with pytest.raises(TypeError_):
            chk("bit<8> f() {return true;}")

    def test_return_outside_function_rejected(self):
        with pytest.raises(TypeError_):
            typecheck.check_statement({}, {}, typecheck.initial_delta(),
                                      parse_statement("return 1;"))


class TestReturnsAnalysis:
    def test_missing_return(self):
        with pytest.raises(MissingReturn):
            chk("bit<8> f(in bool b) {if (b) {return 1w8;}}")

    def test_both_branches(self):
        chk("bit<8> f(in bool b) {if (b) {return 1w8;} else {exit;}}")

    def test_void_falls_through(self):
        chk("{} f() {bit<8> x := 1w8;}")


class TestDeclarations:
    def test_const_must_be_compile_time(self):
        with pytest.raises(TypeError_):
            chk("bit<8> x := 1w8;\nconst bit<8> c = x;")

    def test_duplicate_enum_member(self):
        with pytest.raises(DuplicateEnumMember):
            chk("enum E {a, a}")

    def test_error_members_merge(self):
        sigma, gamma, delta = chk("error {A}\nerror {B}")
        assert set(delta.lookup("error").members) >= {"NoError", "A", "B"}

    def test_duplicate_type_name(self):
        with pytest.raises(TypeError_):
            chk("enum E {a}\nenum E {b}")

    def test_duplicate_param_names(self):
        with pytest.raises(TypeError_):
            chk("{} f(in bit<8> p, in bool p) {}")

    def test_generic_function(self):
        sigma, gamma, delta = chk(
            "X id<:X:>(in X v) {return v;}\n"
            "bit<8> r := id<:bit<8>:>(7w8);"
        )
        assert gamma["r"] == BitT(8)

    def test_generic_call_type_mismatch(self):
        with pytest.raises(TypeError_):
            chk("X id<:X:>(in X v) {return v;}\n"
                "bit<8> r := id<:bit<4>:>(7w8);")

    def test_out_arg_requires_inout_path(self):
        with pytest.raises(TypeError_):
            chk("{} f(out bit<8> p) {p := 1w8;}\n"
                "const bit<8> c = 0w8;\n"
                "{} g() {f(c);}")

    def test_table_keys_eq_comparable(self):
        with pytest.raises(TypeError_):
            chk("typedef record {bit<8> a;} R;\n"
                "R r := {a = 1w8};\n"
                "{} act() {}\n"
                "table t {key = {r : exact;} actions = {act();}}")

    def test_table_needs_action(self):
        with pytest.raises(Exception):
            parse_program("table t {key = {} actions = {}}")

    def test_unknown_match_kind(self):
        with pytest.raises(TypeError_):
            chk("bit<8> x := 0w8;\n{} act() {}\n"
                "table t {key = {x : ternary;} actions = {act();}}")

    def test_match_kind_extension(self):
        chk("match_kind {ternary}\nbit<8> x := 0w8;\n{} act() {}\n"
            "table t {key = {x : ternary;} actions = {act();}}")

    def test_control_decl(self):
        sigma, gamma, delta = chk(
            "control C() {bit<8> v; apply {v := 1w8;}}\nC() inst;"
        )
        assert gamma["inst"] == FunT((), (), VOID)

    def test_control_ctor_args(self):
        chk("control C()(bit<8> base) {apply {}}\nC(3w8) inst;")
        with pytest.raises(TypeError_):
            chk("control C()(bit<8> base) {apply {}}\nC(true) inst;")

    def test_action_ctrl_params_direction_in(self):
        sigma, gamma, delta = chk(
            "bit<8> x := 0w8;\n"
            "{} act(in bit<8> p) {x := p;}\n{} dfl() {}\n"
            "table t {key = {x : exact;} actions = {act(; p:bit<8>); dfl();}}"
        )
        assert "t" in gamma
