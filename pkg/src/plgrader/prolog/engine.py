"""Minimal Prolog engine with CLP(Q)-style curly-brace constraints.

Used as a fallback runtime when no SWI-Prolog binary is installed. It
covers the language subset that GSM8K-style solver programs use: facts,
rules, conjunction/disjunction, unification, ISO arithmetic via is/2,
arithmetic comparisons, and rational-arithmetic constraints written as
{ ... }. The solver is an explicit-stack machine, so runaway recursion
spins until the surrounding process timeout instead of blowing the
Python stack.
"""

from __future__ import annotations

import sys
from fractions import Fraction


class PrologSyntaxError(Exception):
    pass


class PrologError(Exception):
    """Runtime error (instantiation, type, existence...)."""


# ---------------------------------------------------------------------------
# Terms


class Var:
    __slots__ = ("name", "ref")

    def __init__(self, name="_"):
        self.name = name
        self.ref = None

    def __repr__(self):
        return f"Var({self.name})"


class Atom:
    __slots__ = ("name",)
    _interned: dict = {}

    def __new__(cls, name):
        a = cls._interned.get(name)
        if a is None:
            a = object.__new__(cls)
            a.name = name
            cls._interned[name] = a
        return a

    def __repr__(self):
        return f"Atom({self.name})"


class Struct:
    __slots__ = ("name", "args")

    def __init__(self, name, args):
        self.name = name
        self.args = tuple(args)

    @property
    def indicator(self):
        return (self.name, len(self.args))

    def __repr__(self):
        return f"Struct({self.name}/{len(self.args)})"


NUMBER_TYPES = (int, float, Fraction)


def deref(t):
    while isinstance(t, Var) and t.ref is not None:
        t = t.ref
    return t


def bind(var, value, trail):
    var.ref = value
    trail.append(var)


def undo(trail, mark):
    while len(trail) > mark:
        entry = trail.pop()
        if isinstance(entry, Var):
            entry.ref = None
        else:  # ("store", store, constraint)
            try:
                entry[1].remove(entry[2])
            except ValueError:
                pass


def unify(a, b, trail):
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = deref(x), deref(y)
        if x is y:
            continue
        if isinstance(x, Var):
            bind(x, y, trail)
        elif isinstance(y, Var):
            bind(y, x, trail)
        elif isinstance(x, Atom) and isinstance(y, Atom):
            if x.name != y.name:
                return False
        elif isinstance(x, NUMBER_TYPES) and isinstance(y, NUMBER_TYPES):
            if type(x) is not type(y) or x != y:
                return False
        elif isinstance(x, Struct) and isinstance(y, Struct):
            if x.name != y.name or len(x.args) != len(y.args):
                return False
            stack.extend(zip(x.args, y.args))
        else:
            return False
    return True


def rename(t, mapping):
    t = deref(t)
    if isinstance(t, Var):
        nv = mapping.get(id(t))
        if nv is None:
            nv = Var(t.name)
            mapping[id(t)] = nv
        return nv
    if isinstance(t, Struct):
        return Struct(t.name, [rename(a, mapping) for a in t.args])
    return t


# ---------------------------------------------------------------------------
# Tokenizer

SYMBOLIC = set("+-*/\\^<>=~:.?@#&$")
PUNCT = set("()[]{},|!;")


class Token:
    __slots__ = ("kind", "value", "pos", "glued")

    def __init__(self, kind, value, pos, glued=False):
        self.kind = kind  # atom, var, int, float, punct, end
        self.value = value
        self.pos = pos
        self.glued = glued  # immediately follows previous token (no layout)

    def __repr__(self):
        return f"{self.kind}:{self.value!r}"


def tokenize(text, tolerant=False):
    toks = []
    i, n = 0, len(text)
    prev_end = -1
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            i = n if j < 0 else j + 2
            continue
        start = i
        glued = start == prev_end
        if c.isdecimal():
            j = i
            while j < n and text[j].isdecimal():
                j += 1
            isfloat = False
            if j < n - 1 and text[j] == "." and text[j + 1].isdecimal():
                isfloat = True
                j += 1
                while j < n and text[j].isdecimal():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdecimal():
                    isfloat = True
                    j = k
                    while j < n and text[j].isdecimal():
                        j += 1
            lit = text[i:j]
            toks.append(
                Token("float" if isfloat else "int",
                      float(lit) if isfloat else int(lit), start, glued)
            )
            i = j
        elif c == "_" or c.isalpha():
            j = i
            while j < n and (text[j] == "_" or text[j].isalnum()):
                j += 1
            name = text[i:j]
            kind = "var" if (c == "_" or c.isupper()) else "atom"
            toks.append(Token(kind, name, start, glued))
            i = j
        elif c == "'":
            j = i + 1
            buf = []
            closed = False
            while j < n:
                if text[j] == "\\" and j + 1 < n:
                    esc = text[j + 1]
                    buf.append({"n": "\n", "t": "\t", "\\": "\\", "'": "'"}.get(esc, esc))
                    j += 2
                elif text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        buf.append("'")
                        j += 2
                    else:
                        closed = True
                        j += 1
                        break
                else:
                    buf.append(text[j])
                    j += 1
            if not closed and not tolerant:
                raise PrologSyntaxError(f"unterminated quoted atom at {i}")
            toks.append(Token("atom", "".join(buf), start, glued))
            i = j
        elif c == '"':
            j = text.find('"', i + 1)
            if j < 0:
                if not tolerant:
                    raise PrologSyntaxError(f"unterminated string at {i}")
                j = n - 1
            toks.append(Token("atom", text[i + 1:j], start, glued))
            i = j + 1
        elif c in SYMBOLIC:
            j = i
            while j < n and text[j] in SYMBOLIC:
                j += 1
            sym = text[i:j]
            # a '.' followed by layout/EOF/comment terminates a clause
            while sym:
                k = sym.find(".")
                if k < 0:
                    toks.append(Token("atom", sym, start, glued))
                    break
                after = start + k + 1
                if k == len(sym) - 1 and (after >= n or text[after] in " \t\r\n%"):
                    if k:
                        toks.append(Token("atom", sym[:k], start, glued))
                    toks.append(Token("end", ".", start + k))
                    break
                if k == 0:
                    toks.append(Token("atom", sym, start, glued))
                    break
                toks.append(Token("atom", sym[:k], start, glued))
                sym = sym[k:]
                start = start + k
                glued = True
            i = j
        elif c in PUNCT:
            toks.append(Token("punct", c, start, glued))
            i += 1
        else:
            if tolerant:
                i += 1
                continue
            raise PrologSyntaxError(f"unexpected character {c!r} at {i}")
        prev_end = i
    return toks


# ---------------------------------------------------------------------------
# Parser (operator precedence climbing)

INFIX = {
    ":-": (1200, "xfx"), "-->": (1200, "xfx"),
    ";": (1100, "xfy"), "->": (1050, "xfy"), ",": (1000, "xfy"),
    "=": (700, "xfx"), "\\=": (700, "xfx"), "is": (700, "xfx"),
    "==": (700, "xfx"), "\\==": (700, "xfx"),
    "=:=": (700, "xfx"), "=\\=": (700, "xfx"),
    "<": (700, "xfx"), ">": (700, "xfx"), "=<": (700, "xfx"), ">=": (700, "xfx"),
    "@<": (700, "xfx"), "@>": (700, "xfx"),
    "+": (500, "yfx"), "-": (500, "yfx"),
    "*": (400, "yfx"), "/": (400, "yfx"), "//": (400, "yfx"),
    "mod": (400, "yfx"), "rem": (400, "yfx"), "rdiv": (400, "yfx"),
    "<<": (400, "yfx"), ">>": (400, "yfx"),
    "**": (200, "xfx"), "^": (200, "xfy"),
}
PREFIX = {":-": (1200, "fx"), "?-": (1200, "fx"), "\\+": (900, "fy"),
          "-": (200, "fy"), "+": (200, "fy")}

_TERM_STOPPERS = {")", "}", "]", ",", "|"}


class Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0
        self.varmap = {}

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self):
        t = self.peek()
        if t is None:
            raise PrologSyntaxError("unexpected end of input")
        self.i += 1
        return t

    def expect(self, value):
        t = self.next()
        if t.value != value:
            raise PrologSyntaxError(f"expected {value!r}, got {t.value!r} at {t.pos}")

    def _infix_name(self, t):
        if t is None or t.kind == "end":
            return None
        if t.kind == "atom" and t.value in INFIX:
            return t.value
        if t.kind == "punct" and t.value in (",", ";"):
            return t.value
        return None

    def parse_term(self, maxprec=1200):
        left, lprec = self.parse_primary(maxprec)
        while True:
            opname = self._infix_name(self.peek())
            if opname is None:
                break
            p, typ = INFIX[opname]
            la = p - 1 if typ in ("xfx", "xfy") else p
            ra = p - 1 if typ in ("xfx", "yfx") else p
            if p > maxprec or lprec > la:
                break
            self.next()
            right = self.parse_term(ra)
            left = Struct(opname, [left, right])
            lprec = p
        return left

    def parse_primary(self, maxprec):
        t = self.next()
        if t.kind in ("int", "float"):
            return t.value, 0
        if t.kind == "var":
            if t.value == "_":
                return Var("_"), 0
            v = self.varmap.get(t.value)
            if v is None:
                v = Var(t.value)
                self.varmap[t.value] = v
            return v, 0
        if t.kind == "punct":
            if t.value == "(":
                inner = self.parse_term(1200)
                self.expect(")")
                return inner, 0
            if t.value == "{":
                nxt = self.peek()
                if nxt is not None and nxt.value == "}":
                    self.next()
                    return Atom("{}"), 0
                inner = self.parse_term(1200)
                self.expect("}")
                return Struct("{}", [inner]), 0
            if t.value == "[":
                return self.parse_list(), 0
            if t.value == "!":
                return Atom("!"), 0
            raise PrologSyntaxError(f"unexpected {t.value!r} at {t.pos}")
        if t.kind == "end":
            raise PrologSyntaxError(f"unexpected '.' at {t.pos}")
        # atom
        name = t.value
        nxt = self.peek()
        if (nxt is not None and nxt.kind == "punct" and nxt.value == "("
                and nxt.glued):
            self.next()
            args = [self.parse_term(999)]
            while True:
                tt = self.next()
                if tt.value == ")":
                    break
                if tt.value != ",":
                    raise PrologSyntaxError(f"expected ',' or ')' at {tt.pos}")
                args.append(self.parse_term(999))
            return Struct(name, args), 0
        if name in PREFIX:
            p, typ = PREFIX[name]
            startable = (
                nxt is not None and nxt.kind != "end"
                and not (nxt.kind == "punct" and nxt.value in _TERM_STOPPERS)
                and not (nxt.kind == "atom" and nxt.value in INFIX
                         and not (nxt.kind == "punct"))
            )
            if p <= maxprec and startable:
                if name == "-" and nxt.kind in ("int", "float"):
                    self.next()
                    return -nxt.value, 0
                arg = self.parse_term(p if typ == "fy" else p - 1)
                return Struct(name, [arg]), p
        return Atom(name), 0

    def parse_list(self):
        nxt = self.peek()
        if nxt is not None and nxt.value == "]":
            self.next()
            return Atom("[]")
        items = [self.parse_term(999)]
        tail = Atom("[]")
        while True:
            t = self.next()
            if t.value == "]":
                break
            if t.value == ",":
                items.append(self.parse_term(999))
            elif t.value == "|":
                tail = self.parse_term(999)
                self.expect("]")
                break
            else:
                raise PrologSyntaxError(f"bad list syntax at {t.pos}")
        for item in reversed(items):
            tail = Struct(".", [item, tail])
        return tail


def read_clauses(text):
    """Yield top-level terms from a program text."""
    toks = tokenize(text)
    i = 0
    while i < len(toks):
        j = i
        while j < len(toks) and toks[j].kind != "end":
            j += 1
        if j == i:  # stray '.'
            i += 1
            continue
        if j >= len(toks):
            raise PrologSyntaxError("operand expected, unterminated clause")
        p = Parser(toks[i:j])
        term = p.parse_term(1200)
        if p.peek() is not None:
            raise PrologSyntaxError(f"operator expected at {p.peek().pos}")
        yield term
        i = j + 1


def parse_term_text(text):
    p = Parser(tokenize(text))
    t = p.parse_term(1200)
    if p.peek() is not None and p.peek().kind != "end":
        raise PrologSyntaxError("trailing tokens after term")
    return t


# ---------------------------------------------------------------------------
# Arithmetic (is/2 and comparisons; ISO-style int/float contagion)


def eval_arith(t):
    t = deref(t)
    if isinstance(t, (int, float)):
        return t
    if isinstance(t, Fraction):
        return int(t) if t.denominator == 1 else t
    if isinstance(t, Var):
        raise PrologError("Arguments are not sufficiently instantiated")
    if isinstance(t, Atom):
        consts = {"pi": 3.141592653589793, "e": 2.718281828459045}
        if t.name in consts:
            return consts[t.name]
        raise PrologError(f"Arithmetic: `{t.name}' is not a function")
    if isinstance(t, Struct):
        name = t.name
        args = [eval_arith(a) for a in t.args]
        if len(args) == 1:
            a = args[0]
            import math
            table = {
                "-": lambda: -a, "+": lambda: a, "abs": lambda: abs(a),
                "float": lambda: float(a), "truncate": lambda: int(a),
                "integer": lambda: int(round(float(a))),
                "round": lambda: int(round(float(a))),
                "sqrt": lambda: math.sqrt(a), "floor": lambda: math.floor(a),
                "ceiling": lambda: math.ceil(a), "sign": lambda: (a > 0) - (a < 0),
            }
            if name in table:
                return table[name]()
        elif len(args) == 2:
            a, b = args
            if name == "+":
                return a + b
            if name == "-":
                return a - b
            if name == "*":
                return a * b
            if name == "/":
                if b == 0:
                    raise PrologError("Arithmetic: evaluation error: zero_divisor")
                if isinstance(a, int) and isinstance(b, int):
                    return a // b if a % b == 0 else a / b
                if isinstance(a, float) or isinstance(b, float):
                    return float(a) / float(b)
                return Fraction(a) / Fraction(b)
            if name == "//":
                return int(a) // int(b)
            if name == "mod":
                return a % b
            if name == "rem":
                return int(a) - (int(a) // int(b)) * int(b)
            if name in ("**", "^"):
                return a ** b
            if name == "min":
                return min(a, b)
            if name == "max":
                return max(a, b)
            if name == "rdiv":
                return Fraction(a) / Fraction(b)
        raise PrologError(f"Arithmetic: `{name}/{len(t.args)}' is not a function")
    raise PrologError("Arithmetic: type error")


# ---------------------------------------------------------------------------
# CLP(Q)-lite: linear rational constraints inside { ... }


def _frac_of(x):
    if isinstance(x, float):
        # repr() gives the shortest decimal, matching CLP(Q)'s
        # rationalization of decimal literals (0.25 -> 1/4)
        return Fraction(repr(x))
    return Fraction(x)


def linearize(t):
    """Return (coeffs: {Var: Fraction}, const: Fraction)."""
    t = deref(t)
    if isinstance(t, NUMBER_TYPES):
        return {}, _frac_of(t)
    if isinstance(t, Var):
        return {t: Fraction(1)}, Fraction(0)
    if isinstance(t, Struct):
        if len(t.args) == 1 and t.name in ("-", "+"):
            c, k = linearize(t.args[0])
            if t.name == "-":
                return {v: -f for v, f in c.items()}, -k
            return c, k
        if len(t.args) == 2:
            lc, lk = linearize(t.args[0])
            rc, rk = linearize(t.args[1])
            if t.name == "+":
                return _merge(lc, rc), lk + rk
            if t.name == "-":
                return _merge(lc, {v: -f for v, f in rc.items()}), lk - rk
            if t.name == "*":
                if not lc:
                    return {v: f * lk for v, f in rc.items()}, lk * rk
                if not rc:
                    return {v: f * rk for v, f in lc.items()}, lk * rk
                raise PrologError("nonlinear constraint")
            if t.name in ("/", "rdiv"):
                if rc:
                    raise PrologError("nonlinear constraint")
                if rk == 0:
                    raise PrologError("zero divisor in constraint")
                return {v: f / rk for v, f in lc.items()}, lk / rk
    raise PrologError("unsupported term in constraint")


def _merge(a, b):
    out = dict(a)
    for v, f in b.items():
        nf = out.get(v, Fraction(0)) + f
        if nf == 0:
            out.pop(v, None)
        else:
            out[v] = nf
    return out


def _as_number(fr):
    return int(fr) if fr.denominator == 1 else fr


_RELATIONS = ("=", "<", ">", "=<", ">=", "=\\=")


def solve_constraints(goal, store, trail):
    """Solve the conjunction inside a { ... } block. Returns bool."""
    flat = []
    stack = [goal]
    while stack:
        g = deref(stack.pop())
        if isinstance(g, Struct) and g.name == "," and len(g.args) == 2:
            stack.append(g.args[1])
            stack.append(g.args[0])
        else:
            flat.append(g)
    for g in flat:
        if not (isinstance(g, Struct) and g.name in _RELATIONS and len(g.args) == 2):
            raise PrologError("unsupported constraint goal")
        lc, lk = linearize(g.args[0])
        rc, rk = linearize(g.args[1])
        coeffs = _merge(lc, {v: -f for v, f in rc.items()})
        if not _resolve(g.name, coeffs, lk - rk, store, trail):
            return False
        if not _propagate(store, trail):
            return False
    return True


def _resolve(rel, coeffs, const, store, trail):
    # coeffs . vars + const  REL  0
    if not coeffs:
        return {
            "=": const == 0, "<": const < 0, ">": const > 0,
            "=<": const <= 0, ">=": const >= 0, "=\\=": const != 0,
        }[rel]
    if rel == "=" and len(coeffs) == 1:
        (v, f), = coeffs.items()
        bind(v, _as_number(-const / f), trail)
        return True
    entry = (rel, coeffs, const)
    store.append(entry)
    trail.append(("store", store, entry))
    return True


def _propagate(store, trail):
    changed = True
    while changed:
        changed = False
        for entry in list(store):
            rel, coeffs, const = entry
            live = {}
            k = const
            for v, f in coeffs.items():
                d = deref(v)
                if isinstance(d, Var):
                    live[d] = live.get(d, Fraction(0)) + f
                else:
                    if not isinstance(d, NUMBER_TYPES):
                        raise PrologError("non-numeric value in constraint")
                    k += f * _frac_of(d)
            live = {v: f for v, f in live.items() if f != 0}
            if len(live) == len(coeffs) and k == const:
                continue
            store.remove(entry)
            if not _resolve(rel, live, k, store, trail):
                return False
            changed = True
            break
    return True


# ---------------------------------------------------------------------------
# Term writer (SWI write/1 style)


def _fmt_number(x):
    if isinstance(x, Fraction):
        return str(int(x)) if x.denominator == 1 else (
            f"{x.numerator} rdiv {x.denominator}"
        )
    if isinstance(x, float):
        return repr(x)
    return str(x)


def term_to_str(t, maxprec=1200):
    t = deref(t)
    if isinstance(t, NUMBER_TYPES):
        return _fmt_number(t)
    if isinstance(t, Var):
        return f"_G{id(t) % 100000}"
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Struct):
        if t.name == "{}" and len(t.args) == 1:
            return "{" + term_to_str(t.args[0]) + "}"
        if t.name == "." and len(t.args) == 2:
            return _write_list(t)
        if len(t.args) == 2 and t.name in INFIX:
            p, typ = INFIX[t.name]
            la = p - 1 if typ in ("xfx", "xfy") else p
            ra = p - 1 if typ in ("xfx", "yfx") else p
            sep = t.name if not t.name[0].isalpha() else f" {t.name} "
            if t.name == ",":
                sep = ","
            s = term_to_str(t.args[0], la) + sep + term_to_str(t.args[1], ra)
            return f"({s})" if p > maxprec else s
        if len(t.args) == 1 and t.name in PREFIX and t.name != ":-":
            p, typ = PREFIX[t.name]
            s = t.name + term_to_str(t.args[0], p if typ == "fy" else p - 1)
            return f"({s})" if p > maxprec else s
        return t.name + "(" + ",".join(term_to_str(a, 999) for a in t.args) + ")"
    return str(t)


def _write_list(t):
    items = []
    while True:
        t = deref(t)
        if isinstance(t, Struct) and t.name == "." and len(t.args) == 2:
            items.append(term_to_str(t.args[0], 999))
            t = t.args[1]
        elif isinstance(t, Atom) and t.name == "[]":
            return "[" + ",".join(items) + "]"
        else:
            return "[" + ",".join(items) + "|" + term_to_str(t, 999) + "]"


# ---------------------------------------------------------------------------
# Engine

BUILTIN_INDICATORS = {
    ("=", 2), ("\\=", 2), ("is", 2), ("<", 2), (">", 2), ("=<", 2), (">=", 2),
    ("=:=", 2), ("=\\=", 2), ("==", 2), ("\\==", 2), ("{}", 1), (",", 2),
    (";", 2), ("->", 2), ("true", 0), ("fail", 0), ("false", 0),
    ("write", 1), ("print", 1), ("nl", 0), ("var", 1), ("nonvar", 1),
    ("call", 1), ("\\+", 1), ("!", 0),
}

_COMPARES = {"=:=": lambda a, b: a == b, "=\\=": lambda a, b: a != b,
             "<": lambda a, b: a < b, ">": lambda a, b: a > b,
             "=<": lambda a, b: a <= b, ">=": lambda a, b: a >= b}


class Engine:
    def __init__(self, out=None):
        self.db = {}
        self.store = []
        self.warnings = []
        self.out = out if out is not None else sys.stdout

    def consult_text(self, text):
        for term in read_clauses(text):
            self.add_clause(term)

    def add_clause(self, term):
        if isinstance(term, Struct) and term.name == ":-" and len(term.args) == 1:
            return  # directives (use_module etc.) are no-ops here
        if isinstance(term, Struct) and term.name == ":-" and len(term.args) == 2:
            head, body = term.args
        else:
            head, body = term, Atom("true")
        head = deref(head)
        if isinstance(head, Atom):
            key = (head.name, 0)
        elif isinstance(head, Struct):
            key = head.indicator
        else:
            self.warnings.append("Ignored clause with non-callable head")
            return
        if key in BUILTIN_INDICATORS:
            self.warnings.append(
                f"No permission to modify static procedure `{key[0]}/{key[1]}'"
            )
            return
        self.db.setdefault(key, []).append((head, body))

    def solve_once(self, goal):
        """Prove goal once. True on success (bindings kept), False on failure.

        Raises PrologError on runtime errors (mirrors an uncaught Prolog
        exception).
        """
        trail = []
        return self._run(goal, trail)

    def _run(self, goal, trail):
        goals = (goal, None)
        # choicepoints: ("goals", resume_goals, mark) for disjunctions,
        # ("clauses", call, rest, clauses, idx, mark) for predicate calls
        cps = []

        def fail():
            nonlocal goals
            while cps:
                cp = cps[-1]
                undo(trail, cp[-1])
                if cp[0] == "goals":
                    cps.pop()
                    goals = cp[1]
                    return True
                _, call, rest, clauses, idx, mark = cp
                while idx < len(clauses):
                    head, body = clauses[idx]
                    idx += 1
                    mapping = {}
                    if unify(call, rename(head, mapping), trail):
                        cps[-1] = ("clauses", call, rest, clauses, idx, mark)
                        goals = (rename(body, mapping), rest)
                        return True
                    undo(trail, mark)
                cps.pop()
            return False

        while True:
            if goals is None:
                return True
            g, rest = goals
            g = deref(g)
            if isinstance(g, Var):
                raise PrologError("Arguments are not sufficiently instantiated")
            if isinstance(g, Atom):
                name, arity, args = g.name, 0, ()
            elif isinstance(g, Struct):
                name, arity, args = g.name, len(g.args), g.args
            else:
                raise PrologError("type error: callable expected")

            key = (name, arity)
            if key == (",", 2):
                goals = (args[0], (args[1], rest))
                continue
            if key == (";", 2):
                left = deref(args[0])
                if isinstance(left, Struct) and left.indicator == ("->", 2):
                    mark = len(trail)
                    if self._run_nested(left.args[0], trail):
                        goals = (left.args[1], rest)
                    else:
                        undo(trail, mark)
                        goals = (args[1], rest)
                    continue
                cps.append(("goals", (args[1], rest), len(trail)))
                goals = (args[0], rest)
                continue
            if key == ("->", 2):
                mark = len(trail)
                if self._run_nested(args[0], trail):
                    goals = (args[1], rest)
                    continue
                undo(trail, mark)
                if fail():
                    continue
                return False
            if key == ("call", 1):
                goals = (args[0], rest)
                continue

            ok = None
            if key == ("true", 0) or key == ("!", 0):
                ok = True  # '!' approximated as true (first-solution queries)
            elif key in (("fail", 0), ("false", 0)):
                ok = False
            elif key == ("=", 2):
                ok = unify(args[0], args[1], trail)
            elif key == ("\\=", 2):
                mark = len(trail)
                u = unify(args[0], args[1], trail)
                undo(trail, mark)
                ok = not u
            elif key == ("==", 2):
                ok = term_to_str(args[0]) == term_to_str(args[1])
            elif key == ("\\==", 2):
                ok = term_to_str(args[0]) != term_to_str(args[1])
            elif key == ("is", 2):
                v = eval_arith(args[1])
                if isinstance(v, Fraction) and v.denominator == 1:
                    v = int(v)
                ok = unify(args[0], v, trail)
            elif arity == 2 and name in _COMPARES:
                ok = _COMPARES[name](eval_arith(args[0]), eval_arith(args[1]))
            elif key == ("{}", 1):
                ok = solve_constraints(args[0], self.store, trail)
            elif key == ("var", 1):
                ok = isinstance(deref(args[0]), Var)
            elif key == ("nonvar", 1):
                ok = not isinstance(deref(args[0]), Var)
            elif key == ("\\+", 1):
                mark = len(trail)
                res = self._run_nested(args[0], trail)
                undo(trail, mark)
                ok = not res
            elif key in (("write", 1), ("print", 1)):
                self.out.write(term_to_str(args[0]))
                ok = True
            elif key == ("nl", 0):
                self.out.write("\n")
                ok = True

            if ok is not None:
                if ok:
                    goals = rest
                    continue
                if fail():
                    continue
                return False

            clauses = self.db.get(key)
            if clauses is None:
                raise PrologError(f"Unknown procedure: {name}/{arity}")
            cps.append(("clauses", g, rest, clauses, 0, len(trail)))
            if fail():
                continue
            return False

    def _run_nested(self, goal, trail):
        # used by ->/2 and \+/1 conditions; shares trail so bindings are
        # kept (->) or undone by the caller (\+)
        try:
            return self._run(goal, trail)
        except PrologError:
            raise
