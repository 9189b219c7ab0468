from intertype.propositional import FALSE, TRUE, CnfBuilder, Prop, conj, disj, implies, neg


def test_constant_folding():
    x = Prop("x")
    assert conj([]) is TRUE
    assert disj([]) is FALSE
    assert conj([FALSE, x]) is FALSE
    assert disj([x, TRUE]) is TRUE
    assert conj([x]) is x
    assert neg(neg(x)) is x
    assert neg(TRUE) is FALSE


def test_solve_simple_formula():
    x, y = Prop("x"), Prop("y")
    cnf = CnfBuilder()
    cnf.require(disj([x, y]))
    cnf.require(neg(x))
    assert cnf.solve(["x", "y"]) == frozenset({"y"})


def test_models_are_enumerated_once():
    x, y = Prop("x"), Prop("y")
    cnf = CnfBuilder()
    cnf.require(disj([x, y]))
    models = set(cnf.models(["x", "y"]))
    assert models == {frozenset({"x"}), frozenset({"y"}), frozenset({"x", "y"})}


def test_cardinality_bounds():
    keys = ["a", "b", "c"]
    cnf = CnfBuilder()
    cnf.require(disj(Prop(k) for k in keys))
    at_most_one = cnf.at_most(keys, 1)
    assert len(list(cnf.models(keys, at_most_one))) == 3
    assert cnf.at_most(keys, 3) == []

    exact = CnfBuilder()
    exact.exactly_one(keys)
    assert all(len(m) == 1 for m in exact.models(keys))


def test_nested_formulas():
    x, y, z = Prop("x"), Prop("y"), Prop("z")
    cnf = CnfBuilder()
    cnf.require(implies(x, conj([y, neg(z)])))
    cnf.require(x)
    assert cnf.solve(["x", "y", "z"]) == frozenset({"x", "y"})


def test_unsatisfiable():
    x = Prop("x")
    cnf = CnfBuilder()
    cnf.require(x)
    cnf.require(neg(x))
    assert cnf.solve(["x"]) is None

    empty = CnfBuilder()
    empty.require(FALSE)
    assert empty.solve(["x"]) is None


def test_guarded_exactly_one():
    keys = ["a", "b", "c"]
    cnf = CnfBuilder()
    cnf.exactly_one(keys, guard=Prop("g"))
    models = list(cnf.models(keys + ["g"]))
    assert len(models) == 8 + 3
    assert all(len(m) == 2 for m in models if "g" in m)

    empty = CnfBuilder()
    empty.exactly_one([], guard=Prop("g"))
    assert empty.solve(["g"]) == frozenset()
