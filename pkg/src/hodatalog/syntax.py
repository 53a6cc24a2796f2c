"""Concrete syntax: types, expressions, rules, programs and databases.

Programs are written with tuple application (``succ(Ord,X,Y)``) and stored
curried (``((succ Ord) X) Y``).  A ``.hodl`` file holds ``#pred`` declarations
followed by rules; a ``.edb`` file holds ground facts.  ``%`` starts a comment.

    #pred e : i -> i -> o.
    #pred reach : i -> i -> o.
    reach(X,Y) :- e(X,Y).
    reach(X,Y) :- e(X,Z), reach(Z,Y).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import ParseError, TypeCheckError

RESERVED_PREFIX = "__"
FALSE = "false"


# ---------------------------------------------------------------- types

class Type:
    __slots__ = ()

    def __str__(self) -> str:
        return format_type(self)


@dataclass(frozen=True, slots=True)
class Iota(Type):
    pass


@dataclass(frozen=True, slots=True)
class Bool(Type):
    pass


@dataclass(frozen=True, slots=True)
class Arrow(Type):
    arg: Type
    result: Type

    def __post_init__(self):
        if not is_predicate_type(self.result):
            raise ValueError(f"arrow result must be a predicate type, got {format_type(self.result)}")


IOTA = Iota()
BOOL = Bool()


def is_predicate_type(t: Type) -> bool:
    while isinstance(t, Arrow):
        t = t.result
    return isinstance(t, Bool)


def arrow(*parts: Type) -> Type:
    """``arrow(a, b, c)`` is ``a -> b -> c``."""
    t = parts[-1]
    for a in reversed(parts[:-1]):
        t = Arrow(a, t)
    return t


def pred_type(*args: Type) -> Type:
    """The predicate type ``args[0] -> ... -> o``."""
    return arrow(*args, BOOL)


def type_args(t: Type) -> tuple[Type, ...]:
    out = []
    while isinstance(t, Arrow):
        out.append(t.arg)
        t = t.result
    return tuple(out)


def format_type(t: Type) -> str:
    if isinstance(t, Iota):
        return "i"
    if isinstance(t, Bool):
        return "o"
    if isinstance(t, Arrow):
        a = format_type(t.arg)
        if isinstance(t.arg, Arrow):
            a = f"({a})"
        return f"{a}->{format_type(t.result)}"
    raise TypeError(f"not a type: {t!r}")


# ---------------------------------------------------------- expressions

@dataclass(frozen=True, slots=True)
class PredVar:
    name: str


@dataclass(frozen=True, slots=True)
class PredConst:
    name: str


@dataclass(frozen=True, slots=True)
class IndVar:
    name: str


@dataclass(frozen=True, slots=True)
class IndConst:
    name: str


@dataclass(frozen=True, slots=True)
class App:
    fun: "Expr"
    arg: "Expr"


@dataclass(frozen=True, slots=True)
class Eq:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True, slots=True)
class Not:
    atom: "Expr"


Expr = Union[PredVar, PredConst, IndVar, IndConst, App, Eq, Not]
VARIABLE_NODES = (PredVar, IndVar)


def flatten_app(e: Expr) -> tuple[Expr, list[Expr]]:
    """Split a curried application into its head and argument list."""
    args = []
    while isinstance(e, App):
        args.append(e.arg)
        e = e.fun
    args.reverse()
    return e, args


def mk_app(head: Expr, args: Iterable[Expr]) -> Expr:
    for a in args:
        head = App(head, a)
    return head


def expr_vars(e: Expr) -> Iterator[str]:
    """Variable names in ``e``, left to right, with repeats."""
    if isinstance(e, (PredVar, IndVar)):
        yield e.name
    elif isinstance(e, App):
        yield from expr_vars(e.fun)
        yield from expr_vars(e.arg)
    elif isinstance(e, Eq):
        yield from expr_vars(e.lhs)
        yield from expr_vars(e.rhs)
    elif isinstance(e, Not):
        yield from expr_vars(e.atom)


def expr_preds(e: Expr) -> Iterator[str]:
    if isinstance(e, PredConst):
        yield e.name
    elif isinstance(e, App):
        yield from expr_preds(e.fun)
        yield from expr_preds(e.arg)
    elif isinstance(e, Eq):
        yield from expr_preds(e.lhs)
        yield from expr_preds(e.rhs)
    elif isinstance(e, Not):
        yield from expr_preds(e.atom)


def expr_consts(e: Expr) -> Iterator[str]:
    if isinstance(e, IndConst):
        yield e.name
    elif isinstance(e, App):
        yield from expr_consts(e.fun)
        yield from expr_consts(e.arg)
    elif isinstance(e, Eq):
        yield from expr_consts(e.lhs)
        yield from expr_consts(e.rhs)
    elif isinstance(e, Not):
        yield from expr_consts(e.atom)


# ------------------------------------------------------ surface syntax

@dataclass(frozen=True, slots=True)
class SName:
    name: str


@dataclass(frozen=True, slots=True)
class SVar:
    name: str


@dataclass(frozen=True, slots=True)
class SCall:
    """Tuple application ``fun(args...)`` as written."""
    fun: object
    args: tuple


@dataclass(frozen=True, slots=True)
class SEq:
    lhs: object
    rhs: object


@dataclass(frozen=True, slots=True)
class SNot:
    atom: object


# ------------------------------------------------------------- program

@dataclass(frozen=True)
class Rule:
    head: str
    head_vars: tuple[str, ...]
    body: tuple[Expr, ...]
    pos: tuple[int, int] | None = field(default=None, compare=False)
    surface: tuple | None = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return format_rule(self)


@dataclass(frozen=True)
class Program:
    declarations: dict[str, Type]
    rules: tuple[Rule, ...]
    constants: tuple[str, ...] = ()
    allow_reserved: bool = False

    def rules_for(self, pred: str) -> list[Rule]:
        return [r for r in self.rules if r.head == pred]

    def __str__(self) -> str:
        return format_program(self)


def make_program(declarations: dict[str, Type], rules: Iterable[Rule],
                 allow_reserved: bool = False) -> Program:
    """Build a Program from already-curried rules, collecting its constants."""
    rules = tuple(rules)
    consts: set[str] = set()
    for r in rules:
        for lit in r.body:
            consts.update(expr_consts(lit))
    return Program(dict(declarations), rules, tuple(sorted(consts)), allow_reserved)


@dataclass(frozen=True)
class Database:
    facts: frozenset[tuple[str, tuple[str, ...]]]
    schema: dict[str, int]
    constants: tuple[str, ...] = ()

    def relation(self, pred: str) -> set[tuple[str, ...]]:
        return {args for p, args in self.facts if p == pred}

    def __str__(self) -> str:
        return format_database(self)


def make_database(facts: Iterable[tuple[str, Iterable[str]]],
                  constants: Iterable[str] = ()) -> Database:
    """Build a Database; ``constants`` adds individuals that occur in no fact."""
    norm: set[tuple[str, tuple[str, ...]]] = set()
    schema: dict[str, int] = {}
    seen: list[str] = []
    for p, args in facts:
        args = tuple(args)
        if schema.setdefault(p, len(args)) != len(args):
            raise ParseError(f"predicate {p} used with arities {schema[p]} and {len(args)}")
        norm.add((p, args))
        seen.extend(args)
    seen.extend(constants)
    return Database(frozenset(norm), schema, tuple(sorted(set(seen))))


# ------------------------------------------------------------ tokenizer

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<arrow>->)
  | (?P<directive>\#[a-z_]+)
  | (?P<punct>[(),.:=])
  | (?P<ident>[A-Za-z_0-9][A-Za-z0-9_']*)
""", re.VERBOSE)


@dataclass(slots=True)
class Token:
    kind: str
    text: str
    pos: tuple[int, int]


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", (line, col))
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            if kind == "ident":
                if s.startswith(RESERVED_PREFIX) or s[0].islower() or s[0].isdigit():
                    kind = "name"
                else:
                    kind = "var"
            toks.append(Token(kind, s, (line, col)))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        i = m.end()
    toks.append(Token("eof", "", (line, col)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def expect(self, kind: str, text: str | None = None) -> Token:
        if not self.at(kind, text):
            want = text or kind
            t = self.tok
            raise ParseError(f"expected {want!r}, found {t.text or t.kind!r}", t.pos)
        return self.next()

    # type := atype ['->' type]
    def parse_type(self) -> Type:
        t = self.tok
        if self.at("punct", "("):
            self.next()
            a = self.parse_type()
            self.expect("punct", ")")
        elif self.at("name", "i"):
            self.next()
            a = IOTA
        elif self.at("name", "o"):
            self.next()
            a = BOOL
        else:
            raise ParseError(f"bad type token {t.text!r}", t.pos)
        if self.at("arrow"):
            self.next()
            r = self.parse_type()
            if not is_predicate_type(r):
                raise ParseError("the result of '->' must be a predicate type", t.pos)
            return Arrow(a, r)
        return a

    def parse_term(self):
        t = self.tok
        if self.at("name"):
            self.next()
            node = SName(t.text)
        elif self.at("var"):
            self.next()
            node = SVar(t.text)
        elif self.at("punct", "("):
            self.next()
            node = self.parse_term()
            self.expect("punct", ")")
        else:
            raise ParseError(f"expected a term, found {t.text or t.kind!r}", t.pos)
        while self.at("punct", "("):
            self.next()
            args = [self.parse_term()]
            while self.at("punct", ","):
                self.next()
                args.append(self.parse_term())
            self.expect("punct", ")")
            node = SCall(node, tuple(args))
        return node

    def parse_literal(self):
        if self.at("name", "not"):
            self.next()
            inner = self.parse_literal()
            if isinstance(inner, SNot):
                raise ParseError("double negation is not allowed", self.tok.pos)
            return SNot(inner)
        if self.at("punct", "("):
            # either a parenthesised literal such as (X=Y) or a parenthesised term
            save = self.i
            self.next()
            try:
                lit = self.parse_literal()
                self.expect("punct", ")")
                if not self.at("punct", "(") and not self.at("punct", "="):
                    return lit
            except ParseError:
                pass
            self.i = save
        lhs = self.parse_term()
        if self.at("punct", "="):
            self.next()
            rhs = self.parse_term()
            return SEq(lhs, rhs)
        return lhs


# ------------------------------------------------------- type inference

class _TV:
    __slots__ = ("id",)

    def __init__(self, i: int):
        self.id = i


class _Unifier:
    """Union-find unification over simple types with type variables."""

    def __init__(self):
        self.parent: dict[int, object] = {}
        self.count = 0

    def fresh(self) -> _TV:
        self.count += 1
        return _TV(self.count)

    def find(self, t):
        while isinstance(t, _TV) and t.id in self.parent:
            t = self.parent[t.id]
        return t

    def occurs(self, v: _TV, t) -> bool:
        t = self.find(t)
        if isinstance(t, _TV):
            return t.id == v.id
        if isinstance(t, _Arr):
            return self.occurs(v, t.a) or self.occurs(v, t.r)
        return False

    def unify(self, a, b) -> bool:
        a, b = self.find(a), self.find(b)
        if isinstance(a, _TV) and isinstance(b, _TV) and a.id == b.id:
            return True
        if isinstance(a, _TV):
            if self.occurs(a, b):
                return False
            self.parent[a.id] = b
            return True
        if isinstance(b, _TV):
            return self.unify(b, a)
        if isinstance(a, _Arr) and isinstance(b, _Arr):
            return self.unify(a.a, b.a) and self.unify(a.r, b.r)
        return a == b

    def resolve(self, t):
        t = self.find(t)
        if isinstance(t, _Arr):
            a, r = self.resolve(t.a), self.resolve(t.r)
            if a is None or r is None:
                return None
            if not is_predicate_type(r):
                return None
            return Arrow(a, r)
        if isinstance(t, _TV):
            return None
        return t

    def show(self, t) -> str:
        t = self.find(t)
        if isinstance(t, _Arr):
            a = self.show(t.a)
            if isinstance(self.find(t.a), _Arr):
                a = f"({a})"
            return f"{a}->{self.show(t.r)}"
        if isinstance(t, _TV):
            return f"?{t.id}"
        return format_type(t)


@dataclass(frozen=True)
class _Arr:
    a: object
    r: object


def _lift(t: Type):
    if isinstance(t, Arrow):
        return _Arr(_lift(t.arg), _lift(t.result))
    return t


def infer_rule_types(head: str, head_vars: tuple[str, ...], body: Iterable[Expr],
                     decls: dict[str, Type], rule_index: int | None = None,
                     strict: bool = True) -> dict[str, Type]:
    """Infer the (monomorphic) type of every variable in one rule.

    With ``strict`` any clash or unresolved variable raises TypeCheckError;
    otherwise such variables are simply left out of the result.
    """
    u = _Unifier()
    vtypes: dict[str, object] = {}
    errors: list[str] = []

    def var(name: str):
        if name not in vtypes:
            vtypes[name] = u.fresh()
        return vtypes[name]

    def fail(msg: str):
        if strict:
            raise TypeCheckError(msg, rule_index)
        errors.append(msg)

    def expr_type(e):
        if isinstance(e, (PredVar, IndVar)):
            return var(e.name)
        if isinstance(e, IndConst):
            return IOTA
        if isinstance(e, PredConst):
            if e.name == FALSE:
                return BOOL
            if e.name not in decls:
                fail(f"undeclared predicate {e.name}")
                return u.fresh()
            return _lift(decls[e.name])
        if isinstance(e, App):
            tf = expr_type(e.fun)
            ta = expr_type(e.arg)
            r = u.fresh()
            if not u.unify(tf, _Arr(ta, r)):
                fail(f"cannot apply {format_expr(e.fun)} : {u.show(tf)} "
                     f"to {format_expr(e.arg)} : {u.show(ta)}")
            return r
        if isinstance(e, Eq):
            for side in (e.lhs, e.rhs):
                ts = expr_type(side)
                if not u.unify(ts, IOTA):
                    fail(f"'=' needs individual operands, {format_expr(side)} has type {u.show(ts)}")
            return BOOL
        if isinstance(e, Not):
            ta = expr_type(e.atom)
            if not u.unify(ta, BOOL):
                fail(f"'not' applied to {format_expr(e.atom)} of type {u.show(ta)}")
            return BOOL
        raise TypeError(f"not an expression: {e!r}")

    if head not in decls:
        fail(f"undeclared predicate {head}")
        htypes: tuple = ()
    else:
        htypes = type_args(decls[head])
        if len(htypes) != len(head_vars):
            fail(f"head {head} has {len(head_vars)} arguments, declaration says {len(htypes)}")
    for v, t in zip(head_vars, htypes):
        if not u.unify(var(v), _lift(t)):
            fail(f"head variable {v} used at conflicting types")
    for lit in body:
        t = expr_type(lit)
        if not u.unify(t, BOOL):
            fail(f"body literal {format_expr(lit)} has type {u.show(t)}, expected o")

    out: dict[str, Type] = {}
    for name, tv in vtypes.items():
        t = u.resolve(tv)
        if t is None:
            if strict:
                raise TypeCheckError(f"cannot determine the type of variable {name} "
                                     f"(partial type {u.show(tv)})", rule_index)
            continue
        out[name] = t
    return out


# -------------------------------------------------------------- parsing

def _surface_to_expr(node, decls: dict[str, Type], vkinds: dict[str, Type],
                     pos=None) -> Expr:
    if isinstance(node, SName):
        if node.name == FALSE or node.name in decls:
            return PredConst(node.name)
        return IndConst(node.name)
    if isinstance(node, SVar):
        t = vkinds.get(node.name, IOTA)
        return IndVar(node.name) if isinstance(t, Iota) else PredVar(node.name)
    if isinstance(node, SCall):
        head = _surface_to_expr(node.fun, decls, vkinds, pos)
        return mk_app(head, [_surface_to_expr(a, decls, vkinds, pos) for a in node.args])
    if isinstance(node, SEq):
        return Eq(_surface_to_expr(node.lhs, decls, vkinds, pos),
                  _surface_to_expr(node.rhs, decls, vkinds, pos))
    if isinstance(node, SNot):
        return Not(_surface_to_expr(node.atom, decls, vkinds, pos))
    raise TypeError(node)


def _surface_names(node) -> Iterator[tuple[str, str]]:
    if isinstance(node, SName):
        yield ("name", node.name)
    elif isinstance(node, SVar):
        yield ("var", node.name)
    elif isinstance(node, SCall):
        yield from _surface_names(node.fun)
        for a in node.args:
            yield from _surface_names(a)
    elif isinstance(node, SEq):
        yield from _surface_names(node.lhs)
        yield from _surface_names(node.rhs)
    elif isinstance(node, SNot):
        yield from _surface_names(node.atom)


def _rule_from_surface(head: str, head_vars: tuple[str, ...], surface: tuple,
                       decls: dict[str, Type], pos, index: int) -> Rule:
    # untyped first pass so that variables can be classified
    prov = {}
    rough = tuple(_surface_to_expr(s, decls, prov) for s in surface)
    vkinds = infer_rule_types(head, head_vars, rough, decls, index, strict=False)
    body = tuple(_surface_to_expr(s, decls, vkinds) for s in surface)
    return Rule(head, head_vars, body, pos, surface)


def parse_program(text: str, allow_reserved: bool = False) -> Program:
    """Parse a ``.hodl`` program into curried form.

    Raises ParseError on lexical/syntactic problems, unknown predicates,
    duplicate declarations, and reserved ``__`` names in user programs.
    """
    p = _Parser(text)
    decls: dict[str, Type] = {}
    pending: list[tuple] = []
    while not p.at("eof"):
        t = p.tok
        if p.at("directive", "#allow_reserved"):
            p.next()
            p.expect("punct", ".")
            allow_reserved = True
            continue
        if p.at("directive", "#pred"):
            p.next()
            name = p.expect("name").text
            p.expect("punct", ":")
            ty = p.parse_type()
            p.expect("punct", ".")
            if name in decls:
                raise ParseError(f"predicate {name} declared twice", t.pos)
            if name in (FALSE, "not"):
                raise ParseError(f"{name} is a reserved word", t.pos)
            if not is_predicate_type(ty):
                raise ParseError(f"predicate {name} must have a predicate type", t.pos)
            decls[name] = ty
            continue
        if p.at("directive"):
            raise ParseError(f"unknown directive {t.text}", t.pos)
        head_node = p.parse_term()
        body_nodes: list = []
        if p.at("neck"):
            p.next()
            if not p.at("punct", "."):
                body_nodes.append(p.parse_literal())
                while p.at("punct", ","):
                    p.next()
                    body_nodes.append(p.parse_literal())
        p.expect("punct", ".")
        pending.append((head_node, tuple(body_nodes), t.pos))

    rules: list[Rule] = []
    consts: set[str] = set()
    for index, (head_node, body_nodes, pos) in enumerate(pending):
        if isinstance(head_node, SName):
            hname, hargs = head_node.name, ()
        elif isinstance(head_node, SCall) and isinstance(head_node.fun, SName):
            hname, hargs = head_node.fun.name, head_node.args
        else:
            raise ParseError("rule head must be a predicate constant applied to arguments", pos)
        if hname == FALSE:
            raise ParseError("cannot define the builtin 'false'", pos)
        head_vars: list[str] = []
        extra: list = []
        taken = {n for s in (head_node,) + body_nodes for _, n in _surface_names(s)}
        for k, a in enumerate(hargs):
            if isinstance(a, SVar):
                head_vars.append(a.name)
            elif isinstance(a, SName) and a.name not in decls:
                # constant in a head position: p(a) becomes p(H) :- H = a
                fresh = f"H_{k}"
                while fresh in taken:
                    fresh += "_"
                taken.add(fresh)
                head_vars.append(fresh)
                extra.append(SEq(SVar(fresh), a))
            else:
                raise ParseError(f"head argument {k + 1} of {hname} must be a variable or constant", pos)
        surface = tuple(extra) + body_nodes
        names = list(_surface_names(SName(hname))) + [
            x for s in surface for x in _surface_names(s)]
        for kind, n in names:
            if kind == "name" and n.startswith(RESERVED_PREFIX) and not allow_reserved:
                raise ParseError(f"names starting with {RESERVED_PREFIX!r} are reserved: {n}", pos)
            if kind == "name" and n == "not":
                raise ParseError("'not' cannot be used as a name", pos)
        if hname not in decls:
            raise ParseError(f"unknown predicate {hname}", pos)
        for s in surface:
            _check_called_names(s, decls, pos)
        rule = _rule_from_surface(hname, tuple(head_vars), surface, decls, pos, index)
        for lit in rule.body:
            consts.update(expr_consts(lit))
        rules.append(rule)
    for n in decls:
        if n.startswith(RESERVED_PREFIX) and not allow_reserved:
            raise ParseError(f"names starting with {RESERVED_PREFIX!r} are reserved: {n}")
    return Program(decls, tuple(rules), tuple(sorted(consts)), allow_reserved)


def _check_called_names(node, decls, pos):
    if isinstance(node, SCall):
        if isinstance(node.fun, SName) and node.fun.name not in decls:
            raise ParseError(f"unknown predicate {node.fun.name}", pos)
        _check_called_names(node.fun, decls, pos)
        for a in node.args:
            _check_called_names(a, decls, pos)
    elif isinstance(node, (SEq,)):
        _check_called_names(node.lhs, decls, pos)
        _check_called_names(node.rhs, decls, pos)
    elif isinstance(node, SNot):
        _check_called_names(node.atom, decls, pos)


def desugar_tuples(prog: Program) -> Program:
    """Rebuild every rule body from its surface form (identity on curried rules)."""
    rules = []
    for i, r in enumerate(prog.rules):
        if r.surface is None:
            rules.append(r)
        else:
            rules.append(_rule_from_surface(r.head, r.head_vars, r.surface,
                                            prog.declarations, r.pos, i))
    return Program(prog.declarations, tuple(rules), prog.constants, prog.allow_reserved)


def parse_database(text: str) -> Database:
    """Parse ground facts ``e(a,b).``; ``#const c, d.`` adds isolated individuals."""
    p = _Parser(text)
    facts: list[tuple[str, tuple[str, ...]]] = []
    extra: list[str] = []
    while not p.at("eof"):
        t = p.tok
        if p.at("directive", "#const"):
            p.next()
            extra.append(p.expect("name").text)
            while p.at("punct", ","):
                p.next()
                extra.append(p.expect("name").text)
            p.expect("punct", ".")
            continue
        node = p.parse_term()
        p.expect("punct", ".")
        if isinstance(node, SName):
            facts.append((node.name, ()))
            continue
        if not (isinstance(node, SCall) and isinstance(node.fun, SName)):
            raise ParseError("a fact must be a predicate applied to constants", t.pos)
        args = []
        for a in node.args:
            if not isinstance(a, SName):
                raise ParseError(f"fact {node.fun.name} is not ground", t.pos)
            args.append(a.name)
        facts.append((node.fun.name, tuple(args)))
    for name, _ in facts:
        if name.startswith(RESERVED_PREFIX):
            raise ParseError(f"names starting with {RESERVED_PREFIX!r} are reserved: {name}")
    try:
        return make_database(facts, extra)
    except ParseError as exc:
        raise ParseError(str(exc)) from None


# ------------------------------------------------------ pretty printing

def format_expr(e: Expr) -> str:
    if isinstance(e, (PredVar, PredConst, IndVar, IndConst)):
        return e.name
    if isinstance(e, App):
        head, args = flatten_app(e)
        h = format_expr(head)
        return f"{h}({','.join(format_expr(a) for a in args)})"
    if isinstance(e, Eq):
        return f"{format_expr(e.lhs)}={format_expr(e.rhs)}"
    if isinstance(e, Not):
        inner = format_expr(e.atom)
        if isinstance(e.atom, Eq):
            return f"not({inner})"
        return f"not {inner}"
    raise TypeError(f"not an expression: {e!r}")


def format_rule(r: Rule) -> str:
    head = r.head + (f"({','.join(r.head_vars)})" if r.head_vars else "")
    if not r.body:
        return head + "."
    return f"{head} :- {', '.join(format_expr(b) for b in r.body)}."


def format_program(prog: Program, header: str | None = None) -> str:
    lines = []
    if header:
        lines.extend(f"% {h}" for h in header.splitlines())
    if prog.allow_reserved:
        lines.append("#allow_reserved.")
    for name, t in prog.declarations.items():
        lines.append(f"#pred {name} : {format_type(t)}.")
    lines.extend(format_rule(r) for r in prog.rules)
    return "\n".join(lines) + "\n"


def format_database(db: Database) -> str:
    lines = []
    used = {c for _, args in db.facts for c in args}
    isolated = [c for c in db.constants if c not in used]
    if isolated:
        lines.append(f"#const {', '.join(isolated)}.")
    for p, args in sorted(db.facts):
        lines.append(f"{p}({','.join(args)})." if args else f"{p}.")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_atom(text: str) -> tuple[str, tuple[str, ...]]:
    """Parse a ground query atom such as ``hamilton(a,c)``."""
    p = _Parser(text.strip().rstrip("."))
    node = p.parse_term()
    if not p.at("eof"):
        raise ParseError(f"trailing input in atom {text!r}", p.tok.pos)
    if isinstance(node, SName):
        return node.name, ()
    if isinstance(node, SCall) and isinstance(node.fun, SName) and all(
            isinstance(a, SName) for a in node.args):
        return node.fun.name, tuple(a.name for a in node.args)
    raise ParseError(f"query must be a ground first-order atom: {text!r}")
