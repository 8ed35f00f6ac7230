"""Symbolic Chern-class calculus through the splitting principle.

Bundles are formal symbols: a rank plus graded integer polynomials for the
classes c_1..c_d, truncated at the even-degree cap d of the base.  Tensor
products and second exterior powers introduce formal first-class roots,
expand the elementary symmetric polynomials of the transformed roots, and
rewrite the result in the elementary symmetric polynomials of each root
group (the constructive fundamental theorem of symmetric polynomials,
by repeated leading-term elimination in lexicographic order).  Everything
is exact integer arithmetic; no floating point enters this module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations

# Ranks above this make root expansion pointless for the intended uses.
RANK_CAP = 6


def _merge_degrees(a: dict, b: dict) -> dict:
    out = dict(a)
    for name, deg in b.items():
        if out.setdefault(name, deg) != deg:
            raise ValueError(f"generator {name!r} declared with two degrees")
    return out


@dataclass(frozen=True)
class GradedPoly:
    """Integer polynomial in named graded generators, truncated by degree.

    ``terms`` maps sorted tuples of generator names (with repetition) to
    integer coefficients; ``degrees`` assigns each generator its degree.
    Monomials whose total degree exceeds ``truncation_degree`` are dropped
    by every operation.
    """

    terms: dict = field(default_factory=dict)
    truncation_degree: int = 0
    degrees: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mono, coeff in self.terms.items():
            if coeff == 0:
                continue
            mono = tuple(sorted(mono))
            if self._degree_of(mono) <= self.truncation_degree:
                clean[mono] = clean.get(mono, 0) + coeff
        object.__setattr__(self, "terms", clean)

    def _degree_of(self, mono) -> int:
        return sum(self.degrees[g] for g in mono)

    @classmethod
    def zero(cls, trunc: int) -> "GradedPoly":
        return cls({}, trunc, {})

    @classmethod
    def constant(cls, c: int, trunc: int) -> "GradedPoly":
        return cls({(): int(c)}, trunc, {})

    @classmethod
    def generator(cls, name: str, degree: int, trunc: int) -> "GradedPoly":
        return cls({(name,): 1}, trunc, {name: degree})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Largest total degree among stored monomials (0 for the zero
        polynomial)."""
        return max((self._degree_of(m) for m in self.terms), default=0)

    def is_homogeneous(self, d: int) -> bool:
        return all(self._degree_of(m) == d for m in self.terms)

    def contains_generator(self, name: str) -> bool:
        return any(name in m for m in self.terms)

    def coefficient(self, mono) -> int:
        return self.terms.get(tuple(sorted(mono)), 0)

    def __add__(self, other: "GradedPoly") -> "GradedPoly":
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return GradedPoly(terms, self.truncation_degree,
                          _merge_degrees(self.degrees, other.degrees))

    def __sub__(self, other: "GradedPoly") -> "GradedPoly":
        return self + (-1) * other

    def __mul__(self, other):
        if isinstance(other, int):
            return GradedPoly({m: other * c for m, c in self.terms.items()},
                              self.truncation_degree, self.degrees)
        self._check(other)
        degrees = _merge_degrees(self.degrees, other.degrees)
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(sorted(m1 + m2))
                terms[mono] = terms.get(mono, 0) + c1 * c2
        return GradedPoly(terms, self.truncation_degree, degrees)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return self.terms == other.terms

    def _check(self, other: "GradedPoly"):
        if self.truncation_degree != other.truncation_degree:
            raise ValueError("mixed truncation degrees")

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for mono in sorted(self.terms, key=lambda m: (self._degree_of(m), m)):
            c = self.terms[mono]
            body = "*".join(mono) if mono else "1"
            bits.append(f"{'+' if c >= 0 else '-'} {abs(c)}*{body}")
        out = " ".join(bits)
        return out[2:] if out.startswith("+ ") else "-" + out[2:]


@dataclass(frozen=True)
class BundleSymbol:
    """Formal bundle: a rank and classes c_1..c_d as graded polynomials."""

    rank: int
    chern: tuple
    truncation_degree: int

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        chern = tuple(self.chern)
        if len(chern) != self.truncation_degree:
            raise ValueError("need one stored class per degree up to the cap")
        for j, c in enumerate(chern, start=1):
            if not c.is_homogeneous(j):
                raise ValueError(f"stored class {j} is not homogeneous of degree {j}")
        object.__setattr__(self, "chern", chern)

    @classmethod
    def trivial(cls, rank: int, trunc: int) -> "BundleSymbol":
        return cls(rank, tuple(GradedPoly.zero(trunc) for _ in range(trunc)), trunc)

    @classmethod
    def generic(cls, tag: str, rank: int, trunc: int) -> "BundleSymbol":
        """Bundle with independent generators c{j}({tag}) for each class."""
        cl = tuple(GradedPoly.generator(f"c{j}({tag})", j, trunc)
                   for j in range(1, trunc + 1))
        return cls(rank, cl, trunc)

    def chern_class(self, j: int) -> GradedPoly:
        """c_j, with c_0 = 1; classes beyond the stored or rank range are 0."""
        if j == 0:
            return GradedPoly.constant(1, self.truncation_degree)
        if j > self.truncation_degree or j > self.rank:
            return GradedPoly.zero(self.truncation_degree)
        return self.chern[j - 1]


# ---------------------------------------------------------------------------
# Root polynomials and the symmetric rewriting engine

# A root polynomial over nvars ordered variables: dict from exponent
# tuples to integer coefficients.


def _rp_add(p: dict, q: dict) -> dict:
    out = dict(p)
    for m, c in q.items():
        nc = out.get(m, 0) + c
        if nc:
            out[m] = nc
        else:
            out.pop(m, None)
    return out


def _rp_scale(p: dict, c: int) -> dict:
    return {m: c * v for m, v in p.items()} if c else {}


def _rp_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            nc = out.get(m, 0) + c1 * c2
            if nc:
                out[m] = nc
            else:
                out.pop(m, None)
    return out


def _rp_var(i: int, nvars: int) -> dict:
    m = [0] * nvars
    m[i] = 1
    return {tuple(m): 1}


def _elementary_in_vars(indices, r: int, nvars: int) -> dict:
    """r-th elementary symmetric polynomial of the given variables."""
    one = {tuple([0] * nvars): 1}
    if r == 0:
        return one
    out: dict = {}
    for combo in combinations(indices, r):
        term = one
        for i in combo:
            term = _rp_mul(term, _rp_var(i, nvars))
        out = _rp_add(out, term)
    return out


def elementary_of_forms(forms: list[dict], r: int, nvars: int) -> dict:
    """r-th elementary symmetric polynomial of arbitrary linear forms,
    by the standard one-form-at-a-time recurrence."""
    e = [{tuple([0] * nvars): 1}] + [{} for _ in range(r)]
    for f in forms:
        for j in range(min(r, len(e) - 1), 0, -1):
            e[j] = _rp_add(e[j], _rp_mul(f, e[j - 1]))
    return e[r]


def rewrite_symmetric(poly: dict, groups: list[list[int]], nvars: int) -> dict:
    """Rewrite a group-wise symmetric polynomial in elementary symmetric
    generators.

    ``groups`` partitions the variables; the input must be symmetric under
    permutations within each group.  Returns a dict mapping tuples
    ``((g, i, power), ...)`` to integer coefficients, where (g, i) names
    the i-th elementary symmetric polynomial of group g.  Gauss-style:
    repeatedly eliminate the lexicographically leading monomial by the
    matching product of elementary symmetric polynomials.
    """
    work = {m: c for m, c in poly.items() if c}
    result: dict = {}
    elem_cache: dict = {}

    def elem(g: int, i: int) -> dict:
        key = (g, i)
        if key not in elem_cache:
            elem_cache[key] = _elementary_in_vars(groups[g], i, nvars)
        return elem_cache[key]

    while work:
        lead = max(work)
        coeff = work[lead]
        emono = []
        expansion = {tuple([0] * nvars): 1}
        for g, idx in enumerate(groups):
            lam = [lead[i] for i in idx]
            if any(lam[t] < lam[t + 1] for t in range(len(lam) - 1)):
                raise ValueError("input is not symmetric within each group")
            lam.append(0)
            for i in range(len(idx)):
                power = lam[i] - lam[i + 1]
                if power > 0:
                    emono.append((g, i + 1, power))
                    for _ in range(power):
                        expansion = _rp_mul(expansion, elem(g, i + 1))
        key = tuple(emono)
        result[key] = result.get(key, 0) + coeff
        work = _rp_add(work, _rp_scale(expansion, -coeff))
    return result


def _substitute(emono_poly: dict, bundles: list[BundleSymbol],
                trunc: int) -> GradedPoly:
    """Replace elementary symmetric generators of group g by the Chern
    classes of bundles[g] and expand."""
    total = GradedPoly.zero(trunc)
    for emono, coeff in emono_poly.items():
        term = GradedPoly.constant(coeff, trunc)
        for (g, i, power) in emono:
            for _ in range(power):
                term = term * bundles[g].chern_class(i)
        total = total + term
    return total


# ---------------------------------------------------------------------------
# Bundle operations


def chern_tensor(E: BundleSymbol, V: BundleSymbol) -> BundleSymbol:
    """Classes of the tensor product, via roots alpha_i + beta_j.

    Expands each elementary symmetric polynomial of the mn sums of formal
    roots, rewrites it symmetrically per root group, and substitutes the
    given classes.  The result has rank m n and the shared truncation.
    """
    if E.truncation_degree != V.truncation_degree:
        raise ValueError("mixed truncation degrees")
    m, n = E.rank, V.rank
    if m > RANK_CAP or n > RANK_CAP:
        raise ValueError("rank too large for root expansion")
    trunc = E.truncation_degree
    nvars = m + n
    groups = [list(range(m)), list(range(m, m + n))]
    forms = [_rp_add(_rp_var(i, nvars), _rp_var(m + j, nvars))
             for i in range(m) for j in range(n)]
    classes = []
    for r in range(1, trunc + 1):
        sigma = elementary_of_forms(forms, r, nvars)
        rewritten = rewrite_symmetric(sigma, groups, nvars)
        classes.append(_substitute(rewritten, [E, V], trunc))
    return BundleSymbol(m * n, tuple(classes), trunc)


def chern_lambda2(E: BundleSymbol) -> BundleSymbol:
    """Classes of the second exterior power, via roots alpha_i + alpha_j
    over the pairs i < j."""
    m = E.rank
    if m > RANK_CAP:
        raise ValueError("rank too large for root expansion")
    if m < 2:
        raise ValueError("second exterior power needs rank at least 2")
    trunc = E.truncation_degree
    groups = [list(range(m))]
    forms = [_rp_add(_rp_var(i, m), _rp_var(j, m))
             for i, j in combinations(range(m), 2)]
    classes = []
    for r in range(1, trunc + 1):
        sigma = elementary_of_forms(forms, r, m)
        rewritten = rewrite_symmetric(sigma, groups, m)
        classes.append(_substitute(rewritten, [E], trunc))
    return BundleSymbol(m * (m - 1) // 2, tuple(classes), trunc)


def conj_or_dual(E: BundleSymbol) -> BundleSymbol:
    """Conjugate or dual bundle: both flip the sign of the odd classes.

    The two operations share the sign rule c_k -> (-1)^k c_k, so applying
    either twice is the identity and the conjugate of the dual carries the
    original classes.
    """
    classes = tuple(((-1) ** j) * c for j, c in enumerate(E.chern, start=1))
    return BundleSymbol(E.rank, classes, E.truncation_degree)


def whitney_sum(E: BundleSymbol, V: BundleSymbol) -> BundleSymbol:
    """Formal direct sum: total class is the product of total classes.
    Used to validate the rewriting engine, not part of the main pipeline."""
    if E.truncation_degree != V.truncation_degree:
        raise ValueError("mixed truncation degrees")
    trunc = E.truncation_degree
    classes = []
    for r in range(1, trunc + 1):
        acc = GradedPoly.zero(trunc)
        for i in range(0, r + 1):
            acc = acc + E.chern_class(i) * V.chern_class(r - i)
        classes.append(acc)
    return BundleSymbol(E.rank + V.rank, tuple(classes), trunc)


def s6_c3_vanishing() -> GradedPoly:
    """Top class of the obstruction bundle of the embedded six-sphere.

    The sphere's tangent symbol has rank 3 with c_1 = c_2 = 0 and c_3 a
    free generator; the base cap is degree 3 since the sphere has no other
    even cohomology.  The obstruction bundle is the tensor product of the
    second exterior power of the conjugate dual tangent symbol with the
    tangent symbol; its third class cancels to the zero polynomial.
    """
    trunc = 3
    t = GradedPoly.generator("t", 3, trunc)
    zero1 = GradedPoly.zero(trunc)
    zero2 = GradedPoly.zero(trunc)
    T = BundleSymbol(3, (zero1, zero2, t), trunc)
    T_conj_dual = conj_or_dual(conj_or_dual(T))
    return chern_tensor(chern_lambda2(T_conj_dual), T).chern_class(3)


# ---------------------------------------------------------------------------
# Expression grammar for the command line

_FUNCS = {"tensor": 2, "lambda2": 1, "conj": 1, "dual": 1}


def parse_bundle_decl(decl: str, trunc: int) -> tuple[str, BundleSymbol]:
    """Parse a declaration like ``T:rank=3,c=[0,0,t]``.

    Class entries are integers (only 0 is graded-consistent), generator
    names (a fresh generator of the matching degree), or ``<int>*<name>``.
    """
    m = re.fullmatch(r"\s*(\w+)\s*:\s*rank\s*=\s*(\d+)\s*,\s*c\s*=\s*\[([^]]*)\]\s*",
                     decl)
    if not m:
        raise ValueError(f"cannot parse bundle declaration: {decl!r}")
    name, rank = m.group(1), int(m.group(2))
    entries = [e.strip() for e in m.group(3).split(",")] if m.group(3).strip() else []
    classes = []
    for j, entry in enumerate(entries, start=1):
        if j > trunc:
            raise ValueError("more classes than the truncation degree allows")
        em = re.fullmatch(r"(-?\d+)\s*\*?\s*([A-Za-z]\w*)?", entry)
        if em and em.group(2) is None:
            if int(em.group(1)) != 0:
                raise ValueError(
                    f"class {j} entry {entry!r} needs a named generator")
            classes.append(GradedPoly.zero(trunc))
        elif em:
            gen = GradedPoly.generator(em.group(2), j, trunc)
            classes.append(int(em.group(1)) * gen)
        elif re.fullmatch(r"[A-Za-z]\w*", entry):
            classes.append(GradedPoly.generator(entry, j, trunc))
        else:
            raise ValueError(f"cannot parse class entry {entry!r}")
    while len(classes) < trunc:
        classes.append(GradedPoly.zero(trunc))
    return name, BundleSymbol(rank, tuple(classes), trunc)


def parse_expr(text: str):
    """Parse the prefix grammar ``tensor(a, b) | lambda2(a) | conj(a) |
    dual(a) | NAME`` into a nested tuple tree."""
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def parse():
        nonlocal pos
        skip_ws()
        m = re.match(r"\w+", text[pos:])
        if not m:
            raise ValueError(f"parse error at {text[pos:]!r}")
        word = m.group(0)
        pos += len(word)
        skip_ws()
        if word in _FUNCS:
            if pos >= len(text) or text[pos] != "(":
                raise ValueError(f"{word} needs parentheses")
            pos += 1
            args = [parse()]
            skip_ws()
            while pos < len(text) and text[pos] == ",":
                pos += 1
                args.append(parse())
                skip_ws()
            if pos >= len(text) or text[pos] != ")":
                raise ValueError("missing closing parenthesis")
            pos += 1
            if len(args) != _FUNCS[word]:
                raise ValueError(f"{word} takes {_FUNCS[word]} argument(s)")
            return (word, *args)
        return ("name", word)

    tree = parse()
    skip_ws()
    if pos != len(text):
        raise ValueError(f"trailing input: {text[pos:]!r}")
    return tree


def eval_expr(tree, bundles: dict) -> BundleSymbol:
    """Evaluate a parsed expression tree against declared bundles."""
    op = tree[0]
    if op == "name":
        if tree[1] not in bundles:
            raise ValueError(f"undeclared bundle {tree[1]!r}")
        return bundles[tree[1]]
    if op == "tensor":
        return chern_tensor(eval_expr(tree[1], bundles), eval_expr(tree[2], bundles))
    if op == "lambda2":
        return chern_lambda2(eval_expr(tree[1], bundles))
    if op in ("conj", "dual"):
        return conj_or_dual(eval_expr(tree[1], bundles))
    raise ValueError(f"unknown operation {op!r}")
