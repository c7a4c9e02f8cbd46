from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import EngineError, ParseError, RankMismatch, ScenarioError, UndeclaredSymbol
from .projective import MetricSpec, Substitution, SymbolRules
from .types import (
    Ambient,
    BasePoint,
    ConstructibleSet,
    CoordCycle,
    Current,
    NamedForm,
    Term,
    coord_name,
    merge_terms,
)
from .weights import (
    FiberFSWeight,
    FiberSectionLog,
    MonomialLog,
    NormLog,
    ReferenceWeight,
    SmoothWeight,
    Weight,
    WeightAtom,
)

INDUCED_WEIGHT = "phi"

SIMPLE_KINDS = ("segre", "chern", "naive_segre", "theta_check", "smooth_check")
CURRENT_KINDS = ("ma", "product", "bracket", "segre", "chern", "segre_product", "naive_segre")
ORACLE_KINDS = ("ma", "product", "segre")


@dataclass(frozen=True)
class Request:
    kind: str
    weights: Tuple[str, ...] = ()
    # one entry per weight for products, outer factor first as written
    sets: Tuple[Optional[ConstructibleSet], ...] = ()
    k: int = 0
    ks: Tuple[int, ...] = ()
    alpha: Optional[str] = None
    target: Optional["Request"] = None
    point: Optional[BasePoint] = None
    tolerance: Optional[float] = None
    line: Optional[int] = field(default=None, compare=False)


@dataclass
class ScenarioFile:
    base_dim: int
    names: Tuple[str, ...] = ()
    rank: int = 1
    metric: Optional[MetricSpec] = None
    theta_tag: str = "theta"
    alt_theta_tag: Optional[str] = None
    forms: Dict[str, int] = field(default_factory=dict)
    segre_g: Dict[int, Tuple[Term, ...]] = field(default_factory=dict)
    alt_segre_g: Dict[int, Tuple[Term, ...]] = field(default_factory=dict)
    substitutions: Tuple[Substitution, ...] = ()
    weights: Dict[str, Weight] = field(default_factory=dict)
    requests: List[Request] = field(default_factory=list)

    @property
    def coord_names(self) -> Tuple[str, ...]:
        return self.names or tuple(coord_name(i) for i in range(1, self.base_dim + 1))

    @property
    def rules(self) -> SymbolRules:
        return SymbolRules(self.theta_tag, dict(self.segre_g), self.substitutions)

    @property
    def alt_rules(self) -> Optional[SymbolRules]:
        if self.alt_theta_tag is None:
            return None
        return self.rules.with_tag(self.alt_theta_tag, dict(self.alt_segre_g or self.segre_g))

    def ambient(self, factors: int = 0) -> Ambient:
        return Ambient(self.base_dim, self.rank, factors)


# --- Lexical patterns ---------------------------------------------------------

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_RATIONAL = r"-?\d+(?:/\d+)?"

_PAT_KEY = re.compile(
    rf"^(space|bundle|metric|theta|alt_theta|subst|compute|form\s+{_IDENT}|weight\s+{_IDENT}"
    rf"|segre_g\s+\d+|alt_segre_g\s+\d+)$"
)
_PAT_SPACE = re.compile(rf"^(\d+)\s*(?:\[\s*({_IDENT}(?:\s*,\s*{_IDENT})*)\s*\])?$")
_PAT_INT = re.compile(r"^\d+$")
_PAT_METRIC = re.compile(r"^(line|conformal|o1weight)\s*:\s*(.+)$")
_PAT_COEFF = re.compile(rf"^({_RATIONAL})\s*\*\s*(?=log\|)")
_PAT_LOG = re.compile(r"^log\|([^|]+)\|\^2$")
_PAT_POWER = re.compile(rf"^({_IDENT})(?:\^(\d+))?$")
_PAT_SECTION = re.compile(r"^section\(xi_(\d+)\)$")
_PAT_SMOOTH = re.compile(rf"^smooth\(({_IDENT})\)$")
_PAT_REF = re.compile(rf"^ref(?:\(({_IDENT})\))?$")
_PAT_FORM_FACTOR = re.compile(rf"^(?:\(({_IDENT})\)\^(\d+)|({_IDENT})(?:\^(\d+))?)$")
_PAT_SUBST = re.compile(rf"^({_IDENT})\s*\*\s*\[([^\]]+)\]\s*->\s*(0|fs)$")
_PAT_XI = re.compile(r"^xi_(\d+)=0$")
_PAT_SIMPLE = re.compile(rf"^({'|'.join(SIMPLE_KINDS)})\s+(\d+)$")
_PAT_MA = re.compile(rf"^ma\s+({_IDENT})\s+(\d+)$")
_PAT_BRACKET = re.compile(rf"^bracket\s+({_IDENT})\s+(\d+)(?:\s+with\s+({_IDENT}))?$")
_PAT_LIST = re.compile(r"^(segre_product|product)\s*\[(.*)\]$", re.DOTALL)
_PAT_WRAP = re.compile(r"^(lelong|oracle)\s*\((.*)\)$", re.DOTALL)
_PAT_FACTOR = re.compile(rf"^({_IDENT})\s*(?::\s*(.+))?$")
_PAT_SET = re.compile(r"^(?:in\{([^}]*)\})?\s*(?:off\{([^}]*)\})?$")
_PAT_POINT = re.compile(rf"^(origin|generic|zero\[\s*({_IDENT}(?:\s*,\s*{_IDENT})*)\s*\])$")
_PAT_FLOAT = re.compile(r"^\d+(?:\.\d*)?(?:[eE]-?\d+)?$")


@dataclass
class _Line:
    number: int
    key: str
    value: str
    column: int


def _fail(msg: str, line: _Line, offset: int = 0) -> ParseError:
    return ParseError(msg, line.number, line.column + offset)


def split_top_level(text: str, seps: str = ",") -> List[Tuple[int, str]]:
    """Split on separators outside (), [] and {}; yields (offset, stripped piece)."""
    out: List[Tuple[int, str]] = []
    depth = 0
    start = 0
    for i, ch in enumerate(text + seps[0]):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch in seps and depth == 0:
            piece = text[start:i]
            stripped = piece.strip()
            if stripped:
                out.append((start + len(piece) - len(piece.lstrip()), stripped))
            start = i + 1
    return out


def _balance(text: str) -> int:
    return sum(text.count(c) for c in "([{") - sum(text.count(c) for c in ")]}")


def _logical_lines(text: str) -> List[_Line]:
    lines: List[_Line] = []
    pending: Optional[_Line] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if pending is not None:
            pending.value += "\n" + body
            if _balance(pending.value) <= 0:
                lines.append(pending)
                pending = None
            continue
        if not body.strip():
            continue
        if "=" not in body:
            raise ParseError("expected 'key = value'", number, len(body) - len(body.lstrip()) + 1)
        key, value = body.split("=", 1)
        column = len(key) + 2 + len(value) - len(value.lstrip())
        entry = _Line(number, " ".join(key.split()), value.strip(), column)
        if not _PAT_KEY.match(entry.key):
            raise ParseError(f"unknown declaration {entry.key!r}", number, len(raw) - len(raw.lstrip()) + 1)
        if _balance(entry.value) > 0:
            pending = entry
        else:
            lines.append(entry)
    if pending is not None:
        raise ParseError("unclosed bracket", pending.number, pending.column)
    return lines


# --- Parser -------------------------------------------------------------------

def parse_scenario(text: str) -> ScenarioFile:
    lines = _logical_lines(text)
    if not lines or lines[0].key != "space":
        where = lines[0].number if lines else 1
        raise ParseError("a scenario starts with 'space = n'", where, 1)
    parser = _Parser()
    for line in lines:
        try:
            parser.feed(line)
        except ScenarioError:
            raise
        except EngineError as exc:
            # domain validation (BadSpec and friends) surfaces at the offending line
            raise ParseError(str(exc), line.number, line.column) from exc
    return parser.scenario


class _Parser:
    def __init__(self) -> None:
        self.scenario: Optional[ScenarioFile] = None
        self.seen: Dict[str, int] = {}

    def feed(self, line: _Line) -> None:
        head = line.key.split()[0]
        if head in ("space", "bundle", "metric", "theta", "alt_theta") and head in self.seen:
            raise _fail(f"'{head}' declared twice (first on line {self.seen[head]})", line)
        self.seen.setdefault(head, line.number)
        getattr(self, f"_decl_{head}")(line)

    # declarations

    def _decl_space(self, line: _Line) -> None:
        m = _PAT_SPACE.match(line.value)
        if not m:
            raise _fail("expected 'space = n' or 'space = n [names]'", line)
        n = int(m.group(1))
        if n < 1:
            raise _fail("base dimension must be positive", line)
        names: Tuple[str, ...] = ()
        if m.group(2):
            names = tuple(s.strip() for s in m.group(2).split(","))
            if len(names) != n or len(set(names)) != n:
                raise _fail(f"need {n} distinct coordinate names", line)
        self.scenario = ScenarioFile(base_dim=n, names=names)

    def _decl_bundle(self, line: _Line) -> None:
        s = self._s
        if not _PAT_INT.match(line.value) or int(line.value) < 1:
            raise _fail("bundle rank must be a positive integer", line)
        if "metric" in self.seen or s.weights:
            raise _fail("declare 'bundle' before the metric and weights", line)
        s.rank = int(line.value)

    def _decl_metric(self, line: _Line) -> None:
        s = self._s
        m = _PAT_METRIC.match(line.value)
        if not m:
            raise _fail("expected 'metric = line|conformal|o1weight: <weight>'", line)
        kind = m.group(1)
        if kind == "line" and s.rank != 1:
            raise RankMismatch(f"a line metric needs rank 1, bundle has rank {s.rank}", line.number, line.column)
        factors = 1 if kind == "o1weight" else 0
        weight = self._weight(m.group(2), line, s.ambient(factors), m.start(2))
        s.metric = MetricSpec(s.rank, kind, weight)

    def _decl_theta(self, line: _Line) -> None:
        self._s.theta_tag = self._ident(line)

    def _decl_alt_theta(self, line: _Line) -> None:
        tag = self._ident(line)
        if tag == self._s.theta_tag:
            raise _fail("the alternative reference form needs its own name", line)
        self._s.alt_theta_tag = tag

    def _decl_form(self, line: _Line) -> None:
        name = line.key.split()[1]
        if not _PAT_INT.match(line.value) or int(line.value) < 1:
            raise _fail("form degree must be a positive integer", line)
        if name in self._s.forms:
            raise _fail(f"form {name} declared twice", line)
        self._s.forms[name] = int(line.value)

    def _decl_segre_g(self, line: _Line) -> None:
        k = int(line.key.split()[1])
        terms = self._form_sum(line)
        SymbolRules(self._s.theta_tag, {k: terms})
        self._s.segre_g[k] = terms

    def _decl_alt_segre_g(self, line: _Line) -> None:
        if self._s.alt_theta_tag is None:
            raise UndeclaredSymbol("alt_segre_g needs an alt_theta declaration", line.number, line.column)
        k = int(line.key.split()[1])
        terms = self._form_sum(line)
        SymbolRules(self._s.alt_theta_tag, {k: terms})
        self._s.alt_segre_g[k] = terms

    def _decl_subst(self, line: _Line) -> None:
        s = self._s
        m = _PAT_SUBST.match(line.value)
        if not m:
            raise _fail("expected 'subst = tag*[xi_a=0,...] -> 0|fs'", line)
        tag = m.group(1)
        if tag != s.theta_tag:
            raise UndeclaredSymbol(f"unknown reference form {tag!r}", line.number, line.column)
        pattern = set()
        for piece in m.group(2).split(","):
            x = _PAT_XI.match(piece.strip())
            if not x:
                raise _fail(f"bad fiber hyperplane {piece.strip()!r}", line, m.start(2))
            a = int(x.group(1))
            if not 1 <= a <= s.rank:
                raise RankMismatch(f"xi_{a} does not exist for rank {s.rank}", line.number, line.column + m.start(2))
            pattern.add(a)
        target = "zero" if m.group(3) == "0" else "fs"
        s.substitutions = s.substitutions + (Substitution(tag, frozenset(pattern), target),)

    def _decl_weight(self, line: _Line) -> None:
        s = self._s
        name = line.key.split()[1]
        if name == INDUCED_WEIGHT:
            raise _fail(f"'{INDUCED_WEIGHT}' is reserved for the metric's induced weight", line)
        if name in s.weights:
            raise _fail(f"weight {name} declared twice", line)
        parsed = self._weight(line.value, line, s.ambient(1), 0)
        factors = 1 if parsed.has_fiber_atoms else 0
        s.weights[name] = Weight(parsed.atoms, s.ambient(factors))

    def _decl_compute(self, line: _Line) -> None:
        body = line.value.strip()
        offset = line.value.find(body)
        if body.startswith("[") and body.endswith("]"):
            body = body[1:-1]
            offset += 1
        for pos, item in split_top_level(body, ",;\n"):
            lines_before = body[:pos].count("\n")
            column = pos - body.rfind("\n", 0, pos) if lines_before else line.column + offset + pos
            where = _Line(line.number + lines_before, line.key, item, column)
            req = self._request(item, where)
            self._s.requests.append(req)

    # pieces

    @property
    def _s(self) -> ScenarioFile:
        assert self.scenario is not None
        return self.scenario

    def _ident(self, line: _Line) -> str:
        if not re.match(rf"^{_IDENT}$", line.value):
            raise _fail("expected a name", line)
        return line.value

    def _coord(self, name: str, line: _Line, offset: int) -> int:
        names = self._s.coord_names
        if name not in names:
            raise UndeclaredSymbol(f"unknown coordinate {name!r}", line.number, line.column + offset)
        return names.index(name) + 1

    def _weight(self, text: str, line: _Line, ambient: Ambient, offset: int) -> Weight:
        atoms: List[WeightAtom] = []
        for pos, piece in split_top_level(text, "+"):
            atoms.append(self._atom(piece, line, ambient, offset + pos))
        if not atoms:
            raise _fail("empty weight", line, offset)
        return Weight(tuple(atoms), ambient)

    def _atom(self, text: str, line: _Line, ambient: Ambient, offset: int) -> WeightAtom:
        coeff = Fraction(1)
        m = _PAT_COEFF.match(text)
        if m:
            coeff = Fraction(m.group(1))
            text = text[m.end():].strip()
        log = _PAT_LOG.match(text)
        if log:
            inner = log.group(1)
            if "," in inner:
                idx = frozenset(self._coord(c.strip(), line, offset) for c in inner.split(","))
                return NormLog(idx, coeff)
            exps = [0] * ambient.base_dim
            for factor in inner.split("*"):
                p = _PAT_POWER.match(factor.strip())
                if not p:
                    raise _fail(f"bad monomial factor {factor.strip()!r}", line, offset)
                exps[self._coord(p.group(1), line, offset) - 1] += int(p.group(2) or 1)
            return MonomialLog(tuple(exps), coeff)
        if m:
            raise _fail("only log atoms take a coefficient", line, offset)
        if text == "fs":
            return FiberFSWeight(1)
        sec = _PAT_SECTION.match(text)
        if sec:
            a = int(sec.group(1))
            if not 1 <= a <= ambient.rank:
                raise RankMismatch(f"section xi_{a} does not exist for rank {ambient.rank}", line.number, line.column + offset)
            return FiberSectionLog(1, a)
        sm = _PAT_SMOOTH.match(text)
        if sm:
            return SmoothWeight(sm.group(1))
        ref = _PAT_REF.match(text)
        if ref:
            return ReferenceWeight(1, ref.group(1) or self._s.theta_tag)
        raise _fail(f"unknown weight atom {text!r}", line, offset)

    def _form_sum(self, line: _Line) -> Tuple[Term, ...]:
        if line.value.strip() == "0":
            return ()
        terms: List[Term] = []
        for pos, piece in split_top_level(line.value, "+"):
            coeff = Fraction(1)
            factors = piece.split("*")
            if re.match(rf"^{_RATIONAL}$", factors[0].strip()):
                coeff = Fraction(factors[0].strip())
                factors = factors[1:]
            smooth: List[NamedForm] = []
            for f in factors:
                fm = _PAT_FORM_FACTOR.match(f.strip())
                if not fm:
                    raise _fail(f"bad form factor {f.strip()!r}", line, pos)
                name = fm.group(1) or fm.group(3)
                power = int(fm.group(2) or fm.group(4) or 1)
                if name not in self._s.forms:
                    raise UndeclaredSymbol(f"form {name!r} is not declared", line.number, line.column + pos)
                smooth.extend([NamedForm(name, self._s.forms[name])] * power)
            terms.append(Term.make(coeff, smooth))
        return merge_terms(terms)

    def _cycle(self, text: str, line: _Line) -> CoordCycle:
        text = text.strip()
        if text == "1":
            return CoordCycle()
        if not (text.startswith("[") and text.endswith("]")):
            raise _fail(f"bad cycle {text!r}", line)
        base: List[int] = []
        fiber: List[Tuple[int, int]] = []
        for part in text[1:-1].split(";"):
            part = part.strip()
            fm = re.match(r"^(\d+)\s*:\s*(.+)$", part)
            if fm:
                j = int(fm.group(1))
                for piece in fm.group(2).split(","):
                    x = _PAT_XI.match(piece.strip())
                    if not x:
                        raise _fail(f"bad fiber hyperplane {piece.strip()!r}", line)
                    fiber.append((j, int(x.group(1))))
                continue
            for piece in part.split(","):
                c = re.match(rf"^({_IDENT})=0$", piece.strip())
                if not c:
                    raise _fail(f"bad coordinate hyperplane {piece.strip()!r}", line)
                base.append(self._coord(c.group(1), line, 0))
        return CoordCycle.of(base, fiber)

    def _set(self, text: str, line: _Line) -> ConstructibleSet:
        text = text.strip()
        if text == "all":
            return ConstructibleSet.whole()
        m = _PAT_SET.match(text)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise _fail(f"bad set {text!r}; use in{{...}} and/or off{{...}}", line)

        def members(body: Optional[str]) -> Tuple[CoordCycle, ...]:
            if body is None:
                return ()
            return tuple(self._cycle(c, line) for c in body.split("|") if c.strip())

        inside = members(m.group(1)) if m.group(1) is not None else None
        return ConstructibleSet(inside=inside, outside=members(m.group(2)))

    def _weight_ref(self, name: str, line: _Line) -> str:
        if name == INDUCED_WEIGHT:
            if self._s.metric is None:
                raise UndeclaredSymbol("'phi' needs a metric declaration", line.number, line.column)
        elif name not in self._s.weights:
            raise UndeclaredSymbol(f"unknown weight {name!r}", line.number, line.column)
        return name

    def _point(self, text: str, line: _Line) -> BasePoint:
        m = _PAT_POINT.match(text.strip())
        if not m:
            raise _fail(f"bad point {text.strip()!r}; use origin, generic or zero[...]", line)
        n = self._s.base_dim
        if m.group(1) == "origin":
            return BasePoint.origin(n)
        if m.group(1) == "generic":
            return BasePoint.generic(n)
        return BasePoint(n, frozenset(self._coord(c.strip(), line, 0) for c in m.group(2).split(",")))

    def _request(self, text: str, line: _Line) -> Request:
        req = self._request_body(text.strip(), line)
        return replace(req, line=line.number)

    def _request_body(self, text: str, line: _Line) -> Request:
        s = self._s
        if text == "degeneracy":
            self._need_metric(line)
            return Request("degeneracy")

        m = _PAT_SIMPLE.match(text)
        if m:
            kind, k = m.group(1), int(m.group(2))
            self._need_metric(line)
            if kind == "theta_check" and s.alt_theta_tag is None:
                raise UndeclaredSymbol("theta_check needs an alt_theta declaration", line.number, line.column)
            return Request(kind, k=k)

        m = _PAT_MA.match(text)
        if m:
            return Request("ma", weights=(self._weight_ref(m.group(1), line),), k=int(m.group(2)))

        m = _PAT_BRACKET.match(text)
        if m:
            alpha = m.group(3)
            if alpha is not None and alpha not in (s.theta_tag, s.alt_theta_tag) and alpha not in s.forms:
                raise UndeclaredSymbol(f"unknown form {alpha!r}", line.number, line.column)
            return Request("bracket", weights=(self._weight_ref(m.group(1), line),), k=int(m.group(2)), alpha=alpha)

        m = _PAT_LIST.match(text)
        if m:
            items = split_top_level(m.group(2))
            if not items:
                raise _fail("empty list", line)
            if m.group(1) == "segre_product":
                self._need_metric(line)
                ks = []
                for _pos, item in items:
                    if not _PAT_INT.match(item) or int(item) < 1:
                        raise _fail(f"Segre indices must be positive integers, got {item!r}", line)
                    ks.append(int(item))
                return Request("segre_product", ks=tuple(ks))
            names, sets = [], []
            for _pos, item in items:
                f = _PAT_FACTOR.match(item)
                if not f:
                    raise _fail(f"bad product factor {item!r}", line)
                names.append(self._weight_ref(f.group(1), line))
                sets.append(self._set(f.group(2), line) if f.group(2) else None)
            return Request("product", weights=tuple(names), sets=tuple(sets))

        m = _PAT_WRAP.match(text)
        if m:
            args = split_top_level(m.group(2))
            if len(args) != 2:
                raise _fail(f"{m.group(1)}(...) takes two arguments", line)
            target = self._request_body(args[0][1], line)
            if m.group(1) == "lelong":
                if target.kind not in CURRENT_KINDS:
                    raise _fail(f"cannot take a Lelong number of {target.kind}", line)
                return Request("lelong", target=target, point=self._point(args[1][1], line))
            if target.kind not in ORACLE_KINDS:
                raise _fail(f"no oracle check for {target.kind}", line)
            if not _PAT_FLOAT.match(args[1][1]):
                raise _fail(f"bad tolerance {args[1][1]!r}", line)
            return Request("oracle", target=target, tolerance=float(args[1][1]))

        raise _fail(f"unknown request {text!r}", line)

    def _need_metric(self, line: _Line) -> None:
        if self._s.metric is None:
            raise UndeclaredSymbol("this request needs a metric declaration", line.number, line.column)


# --- Rendering ----------------------------------------------------------------

def render_request(req: Request, names: Optional[Sequence[str]] = None) -> str:
    if req.kind in SIMPLE_KINDS:
        return f"{req.kind} {req.k}"
    if req.kind == "degeneracy":
        return "degeneracy"
    if req.kind == "ma":
        return f"ma {req.weights[0]} {req.k}"
    if req.kind == "bracket":
        text = f"bracket {req.weights[0]} {req.k}"
        return text + (f" with {req.alpha}" if req.alpha else "")
    if req.kind == "segre_product":
        return "segre_product [" + ", ".join(str(k) for k in req.ks) + "]"
    if req.kind == "product":
        items = []
        for w, U in zip(req.weights, req.sets):
            items.append(w if U is None else f"{w}: {U.render(names)}")
        return "product [" + ", ".join(items) + "]"
    assert req.target is not None
    inner = render_request(req.target, names)
    if req.kind == "lelong":
        assert req.point is not None
        return f"lelong({inner}, {req.point.render(names)})"
    return f"oracle({inner}, {req.tolerance!r})"


def _render_forms(terms: Tuple[Term, ...], s: ScenarioFile) -> str:
    return Current(s.ambient(0), terms).render()


def render_scenario(s: ScenarioFile) -> str:
    names = s.coord_names
    out = [f"space = {s.base_dim}" + (f" [{', '.join(s.names)}]" if s.names else "")]
    out.append(f"bundle = {s.rank}")
    for name, deg in s.forms.items():
        out.append(f"form {name} = {deg}")
    out.append(f"theta = {s.theta_tag}")
    if s.alt_theta_tag is not None:
        out.append(f"alt_theta = {s.alt_theta_tag}")
    if s.metric is not None:
        out.append(f"metric = {s.metric.kind}: {s.metric.weight.render(names)}")
    for k in sorted(s.segre_g):
        out.append(f"segre_g {k} = {_render_forms(s.segre_g[k], s)}")
    for k in sorted(s.alt_segre_g):
        out.append(f"alt_segre_g {k} = {_render_forms(s.alt_segre_g[k], s)}")
    for sub in s.substitutions:
        hyper = ",".join(f"xi_{a}=0" for a in sorted(sub.pattern))
        out.append(f"subst = {sub.tag}*[{hyper}] -> {'0' if sub.replacement == 'zero' else 'fs'}")
    for name, w in s.weights.items():
        out.append(f"weight {name} = {w.render(names)}")
    if s.requests:
        out.append("compute = [")
        out.extend(f"  {render_request(r, names)}," for r in s.requests)
        out.append("]")
    return "\n".join(out) + "\n"
