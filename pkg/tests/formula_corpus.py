"""Fifty well-formed formulas for the fixpoint and round-trip batteries.

Each entry is (formula text, declared free variables).  Covers the
core constructors, the derived macros, both binders, nesting of mu
under nu and vice versa, and free variables inside binders.
"""

CORPUS: list[tuple[str, tuple[str, ...]]] = [
    # constants and atoms
    ("ff", ()),
    ("tt", ()),
    ("p", ()),
    ("q", ()),
    ("~p", ()),
    ("~~p", ()),
    # propositional connectives
    ("p -> q", ()),
    ("p -> q -> p", ()),
    ("(p -> q) -> p", ()),
    ("p & q", ()),
    ("p | q", ()),
    ("p & q -> p | q", ()),
    ("~(p & ~q)", ()),
    # modalities
    ("[a] p", ()),
    ("<a> p", ()),
    ("[b] ff", ()),
    ("[a] [b] p", ()),
    ("<a> <a> p", ()),
    ("[a] (p -> q)", ()),
    ("[a] p -> [a] q", ()),
    ("~[a] ~p", ()),
    # plain fixpoints
    ("mu x . x", ()),
    ("mu x . p", ()),
    ("mu x . p -> x", ()),
    ("mu x . ~p -> [a] x", ()),
    ("mu x . p | <a> x", ()),
    ("mu x . p | x", ()),
    ("mu x . [a] x", ()),
    ("mu x . <a> x", ()),
    ("mu x . x | x", ()),
    ("nu x . x", ()),
    ("nu x . p", ()),
    ("nu x . p & [a] x", ()),
    ("nu x . p & x", ()),
    ("nu x . [a] x", ()),
    ("nu x . <a> x", ()),
    # nested binders
    ("mu x . mu y . x | y", ()),
    ("mu x . nu y . (p & [a] y) | <a> x", ()),
    ("nu x . mu y . (p & [a] x) | <a> y", ()),
    ("nu x . nu y . x & y & p", ()),
    ("mu x . [a] mu y . x | y", ()),
    ("mu x . (nu y . p & [a] y) | <b> x", ()),
    # shadowed binder names
    ("mu x . p | <a> mu x . q | <a> x", ()),
    ("nu x . [a] nu x . [b] x", ()),
    # free variables, alone and under binders
    ("z", ("z",)),
    ("z -> p", ("z",)),
    ("z & ~w", ("z", "w")),
    ("mu x . z | <a> x", ("z",)),
    ("nu x . z & [a] x", ("z",)),
    ("mu x . (z -> x) & (w | p)", ("z", "w")),
]

assert len(CORPUS) == 50
