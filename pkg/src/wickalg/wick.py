"""Twists, twisted products, and the normal-ordering engine.

The twist moves a fully starred word past a fully unstarred one.  On a
generator pair it transposes with the commutation factor of the grades and
contracts with the pairing:

    tau(x*_i (x) x_j) = eps(grade_j, -grade_i) x_j (x) x*_i + g_ij 1 (x) 1.

Longer words are handled by recursive expansion through the two
interchange laws, which amounts to summing over all partial contraction
schemes with one transposition factor per crossed pair.  Normal ordering
rewrites any mixed word into the span of words whose unstarred letters all
precede the starred ones; the rewrite system has no overlapping redexes,
so every strategy reaches the same normal form.

A ``TwistSpec`` may carry overrides that replace the twist's output on
specific word pairs.  A clean letter-wise rule always satisfies the
interchange laws, so overrides are the one way to produce a genuine
non-twist, and they make the twisted product non-associative; the axiom
checker and the product route through the same map, which keeps the
"associative iff twist" pairing exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .freealg import Generator, GradedPoly, Word
from .groups import Bicharacter, DomainError
from .report import CheckReport, fmt_complex, fmt_float

# encoded twist term: (unstarred generator indices, starred generator indices)
TermKey = tuple[tuple[int, ...], tuple[int, ...]]
TermDict = dict[TermKey, complex]


def is_normal_word(word: Word) -> bool:
    """True when no starred letter precedes an unstarred one."""
    seen_star = False
    for g in word.letters:
        if g.starred:
            seen_star = True
        elif seen_star:
            return False
    return True


class WickPoly(GradedPoly):
    """Polynomial all of whose words are normal ordered."""

    def __init__(self, terms=None, tolerance: float = 1e-9):
        super().__init__(terms, tolerance)
        for w in self.terms:
            if not is_normal_word(w):
                raise DomainError(f"word {w.compact()} is not normal ordered")


@dataclass(frozen=True, eq=False)
class TwistSpec:
    """Bicharacter, generator list, and pairing defining one twist.

    ``pairing[i][j]`` is the contraction value of x*_i against x_j; the
    default is the identity (dual bases).  Derived factor tables and the
    memo cache are set up once in ``__post_init__``; the cache is an
    implementation detail and does not affect the value semantics.
    """

    bicharacter: Bicharacter
    generators: tuple[Generator, ...]
    pairing: tuple[tuple[complex, ...], ...] | None = None
    tolerance: float = 1e-9

    def __post_init__(self) -> None:
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise DomainError("a twist needs at least one generator")
        group = self.bicharacter.group
        names = set()
        for g in gens:
            if g.starred:
                raise DomainError("twist generators must be unstarred")
            if g.grade.group != group:
                raise DomainError(f"generator {g.name} is graded over the wrong group")
            if g.name in names:
                raise DomainError(f"duplicate generator name {g.name}")
            names.add(g.name)
        n = len(gens)
        if self.pairing is None:
            pairing = tuple(
                tuple(1.0 + 0.0j if i == j else 0.0 + 0.0j for j in range(n)) for i in range(n)
            )
        else:
            pairing = tuple(tuple(complex(v) for v in row) for row in self.pairing)
            if len(pairing) != n or any(len(row) != n for row in pairing):
                raise DomainError(f"pairing must be {n}x{n}")
        object.__setattr__(self, "pairing", pairing)
        factor = tuple(
            tuple(self.bicharacter.value(gens[j].grade, -gens[i].grade) for j in range(n))
            for i in range(n)
        )
        object.__setattr__(self, "_factor", factor)
        object.__setattr__(self, "_index", {g.name: i for i, g in enumerate(gens)})
        object.__setattr__(self, "_cache", {})
        object.__setattr__(self, "_overrides", {})

    @property
    def n(self) -> int:
        return len(self.generators)

    def factor(self, i: int, j: int) -> complex:
        """Transposition coefficient for moving x*_i right past x_j."""
        return self._factor[i][j]

    def pair(self, i: int, j: int) -> complex:
        return self.pairing[i][j]

    # -- diagnostics ---------------------------------------------------

    def pairing_hermitian(self) -> CheckReport:
        worst, witness = 0.0, None
        for i, row in enumerate(self.pairing):
            for j in range(self.n):
                r = abs(row[j] - self.pairing[j][i].conjugate())
                if r > worst:
                    worst, witness = r, f"({self.generators[i].name},{self.generators[j].name})"
        passed = worst <= self.tolerance
        return CheckReport("pairing-hermitian", passed, worst, None if passed else witness)

    def star_compatible(self) -> CheckReport:
        """Generator-level condition for the star operation to respect the twist.

        conj(factor[i][j]) must equal factor[j][i] and the pairing must be
        Hermitian; together these make (tau(b* (x) a))* = tau(a* (x) b)
        hold on generators and hence on all words.
        """
        worst, witness = 0.0, None
        for i in range(self.n):
            for j in range(self.n):
                r = abs(self._factor[i][j].conjugate() - self._factor[j][i])
                r = max(r, abs(self.pairing[i][j] - self.pairing[j][i].conjugate()))
                if r > worst:
                    worst, witness = r, f"({self.generators[i].name},{self.generators[j].name})"
        passed = worst <= self.tolerance
        return CheckReport("star-compatible", passed, worst, None if passed else witness)

    # -- encoding ------------------------------------------------------

    def _gen_index(self, g: Generator) -> int:
        i = self._index.get(g.name)
        if i is None:
            raise DomainError(f"unknown generator {g.label()}")
        base = self.generators[i]
        if g != base and g != base.star():
            raise DomainError(f"generator {g.label()} does not match the spec's {base.label()}")
        return i

    def _encode_plain(self, word: Word) -> tuple[int, ...]:
        out = []
        for g in word.letters:
            if g.starred:
                raise DomainError("expected an unstarred word")
            out.append(self._gen_index(g))
        return tuple(out)

    def _encode_star(self, word: Word) -> tuple[int, ...]:
        out = []
        for g in word.letters:
            if not g.starred:
                raise DomainError("expected a fully starred word")
            out.append(self._gen_index(g))
        return tuple(out)

    def _split(self, word: Word) -> TermKey:
        """Split a normal word into its creation and annihilation runs."""
        k = len(word.letters)
        for pos, g in enumerate(word.letters):
            if g.starred:
                k = pos
                break
        u = self._encode_plain(Word(word.letters[:k]))
        v = self._encode_star(Word(word.letters[k:]))
        return u, v

    def _decode(self, u: Sequence[int], v: Sequence[int]) -> Word:
        letters = tuple(self.generators[i] for i in u)
        letters += tuple(self.generators[i].star() for i in v)
        return Word(letters)

    # -- the twist -----------------------------------------------------

    def with_override(self, star_word: Word, word: Word, result: GradedPoly) -> TwistSpec:
        """Copy of this spec whose twist returns ``result`` on exactly this pair.

        Used to manufacture non-twists; the trivial legs (empty word on
        either side) stay untouched so the unit laws survive.
        """
        s = self._encode_star(star_word)
        w = self._encode_plain(word)
        if not s or not w:
            raise DomainError("overrides need a nonempty word on both sides")
        enc: TermDict = {}
        for rw, c in result.terms.items():
            enc[self._split(rw)] = complex(c)
        new = TwistSpec(self.bicharacter, self.generators, self.pairing, self.tolerance)
        overrides = dict(self._overrides)
        overrides[(s, w)] = enc
        object.__setattr__(new, "_overrides", overrides)
        return new

    @property
    def overrides(self) -> dict:
        return dict(self._overrides)

    def twist_terms(self, s: tuple[int, ...], w: tuple[int, ...]) -> TermDict:
        """Twist of the starred word ``s`` past the unstarred word ``w``.

        Memoized recursion: single letters use the generator rule, longer
        words peel one letter through the corresponding interchange law.
        """
        key = (s, w)
        hit = self._overrides.get(key)
        if hit is not None:
            return hit
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out: TermDict = {}
        if not s:
            out[(w, ())] = 1.0 + 0.0j
        elif not w:
            out[((), s)] = 1.0 + 0.0j
        elif len(w) > 1:
            head, rest = w[:1], w[1:]
            for (u1, v1), c1 in self.twist_terms(s, head).items():
                for (u2, v2), c2 in self.twist_terms(v1, rest).items():
                    k = (u1 + u2, v2)
                    out[k] = out.get(k, 0.0 + 0.0j) + c1 * c2
        elif len(s) > 1:
            head, rest = s[:1], s[1:]
            for (u1, v1), c1 in self.twist_terms(rest, w).items():
                for (u2, v2), c2 in self.twist_terms(head, u1).items():
                    k = (u2, v2 + v1)
                    out[k] = out.get(k, 0.0 + 0.0j) + c1 * c2
        else:
            i, j = s[0], w[0]
            out[((j,), (i,))] = self._factor[i][j]
            g = self.pairing[i][j]
            if g != 0:
                out[((), ())] = g
        out = {k: c for k, c in out.items() if abs(c) > self.tolerance}
        self._cache[key] = out
        return out


def apply_twist(t: TwistSpec, star_word: Word, word: Word) -> GradedPoly:
    """Twist a fully starred word past a fully unstarred word."""
    s = t._encode_star(star_word)
    w = t._encode_plain(word)
    terms = t.twist_terms(s, w)
    return GradedPoly({t._decode(u, v): c for (u, v), c in terms.items()}, t.tolerance)


def _mul_terms(t: TwistSpec, a: TermDict, b: TermDict) -> TermDict:
    """Twisted product on encoded normal terms."""
    out: TermDict = {}
    for (u1, v1), c1 in a.items():
        for (u2, v2), c2 in b.items():
            base = c1 * c2
            for (mid_u, mid_v), c in t.twist_terms(v1, u2).items():
                k = (u1 + mid_u, mid_v + v2)
                out[k] = out.get(k, 0.0 + 0.0j) + base * c
    return {k: c for k, c in out.items() if abs(c) > t.tolerance}


def multiply_wick(t: TwistSpec, p: GradedPoly, q: GradedPoly) -> WickPoly:
    """Product of two normal-ordered polynomials, renormalized.

    Concatenating the words puts the starred run of ``p`` against the
    unstarred run of ``q``; the twist resolves exactly that interface and
    the result is normal ordered again.  For clean specs this agrees with
    rewriting the concatenation to normal form.
    """
    a = {t._split(w): c for w, c in p.terms.items()}
    b = {t._split(w): c for w, c in q.terms.items()}
    acc = _mul_terms(t, a, b)
    return WickPoly({t._decode(u, v): c for (u, v), c in acc.items()}, t.tolerance)


# -- letter-level rewriting ---------------------------------------------

def _encode_mixed(t: TwistSpec, word: Word) -> tuple[int, ...]:
    # even = creation index, odd = annihilation index
    out = []
    for g in word.letters:
        i = t._gen_index(g)
        out.append(2 * i + 1 if g.starred else 2 * i)
    return tuple(out)


def _decode_mixed(t: TwistSpec, enc: Sequence[int]) -> Word:
    letters = []
    for code in enc:
        i, starred = divmod(code, 2)
        letters.append(t.generators[i].star() if starred else t.generators[i])
    return Word(tuple(letters))


def normal_order(t: TwistSpec, p: GradedPoly | Word, strategy: str = "leftmost") -> WickPoly:
    """Rewrite every starred-before-unstarred adjacency until none remain.

    One rewrite replaces the adjacent pair x*_i x_j by the transposed pair
    weighted by the commutation factor plus the contraction g_ij.  The
    strategy picks which adjacency of a term is rewritten first; redexes
    never overlap, so every strategy reaches the same normal form.  Each
    term's rewrite chain is bounded by len**2 steps (swaps strictly reduce
    inversions, contractions strictly reduce length), enforced by a
    counter.

    Overrides on a corrupted spec are word-level data of the twist map and
    are deliberately invisible to this letter-level engine.
    """
    if strategy not in ("leftmost", "rightmost"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if isinstance(p, Word):
        p = GradedPoly({p: 1.0}, t.tolerance)
    acc: dict[tuple[int, ...], complex] = {}
    for word, c0 in p.terms.items():
        enc = _encode_mixed(t, word)
        bound = len(enc) * len(enc) + 1
        stack: list[tuple[tuple[int, ...], complex, int]] = [(enc, complex(c0), 0)]
        while stack:
            letters, c, steps = stack.pop()
            redexes = [
                pos
                for pos in range(len(letters) - 1)
                if letters[pos] % 2 == 1 and letters[pos + 1] % 2 == 0
            ]
            if not redexes:
                acc[letters] = acc.get(letters, 0.0 + 0.0j) + c
                continue
            if steps >= bound:
                raise RuntimeError("normal ordering exceeded its termination bound")
            pos = redexes[0] if strategy == "leftmost" else redexes[-1]
            i = letters[pos] // 2
            j = letters[pos + 1] // 2
            swapped = letters[:pos] + (letters[pos + 1], letters[pos]) + letters[pos + 2 :]
            stack.append((swapped, c * t._factor[i][j], steps + 1))
            g = t.pairing[i][j]
            if g != 0:
                stack.append((letters[:pos] + letters[pos + 2 :], c * g, steps + 1))
    terms = {_decode_mixed(t, enc): c for enc, c in acc.items()}
    return WickPoly(terms, t.tolerance)


def star_wick(p: GradedPoly) -> WickPoly:
    """Star operation on normal-ordered polynomials.

    The involution of a normal word is normal again (the starred tail
    becomes the unstarred head), so no reordering is needed; the
    antihomomorphism property against the twisted product is what requires
    a star-compatible spec and is checked separately.
    """
    return WickPoly(p.involution().terms, p.tolerance)


# -- law checking --------------------------------------------------------

def _dict_diff(a: TermDict, b: TermDict) -> float:
    keys = set(a) | set(b)
    return max((abs(a.get(k, 0.0 + 0.0j) - b.get(k, 0.0 + 0.0j)) for k in keys), default=0.0)


def _index_words(n: int, max_len: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    for length in range(max_len + 1):
        out.extend(itertools.product(range(n), repeat=length))
    return out


def check_twist_axioms(t: TwistSpec, max_len: int) -> CheckReport:
    """Exhaustively verify both interchange laws on words up to ``max_len``.

    The law applied at an arbitrary split point must agree with the
    engine's own (leftmost) expansion; a word-level override breaks some
    split and is caught here.
    """
    words = _index_words(t.n, max_len)
    worst, witness = 0.0, None

    def note(r: float, tag: str) -> None:
        nonlocal worst, witness
        if r > worst:
            worst = r
            if r > t.tolerance and witness is None:
                pass
        if r > t.tolerance and witness is None:
            record(tag)

    recorded = []

    def record(tag: str) -> None:
        recorded.append(tag)

    for s in words:
        for w1 in words:
            left = t.twist_terms(s, w1)
            for w2 in words:
                lhs = t.twist_terms(s, w1 + w2)
                rhs: TermDict = {}
                for (u1, v1), c1 in left.items():
                    for (u2, v2), c2 in t.twist_terms(v1, w2).items():
                        k = (u1 + u2, v2)
                        rhs[k] = rhs.get(k, 0.0 + 0.0j) + c1 * c2
                r = _dict_diff(lhs, rhs)
                if r > worst:
                    worst = r
                if r > t.tolerance and witness is None:
                    witness = f"law1(s={_fmt_star(t, s)},w1={_fmt_plain(t, w1)},w2={_fmt_plain(t, w2)})"
    for s1 in words:
        for s2 in words:
            for w in words:
                lhs = t.twist_terms(s1 + s2, w)
                rhs = {}
                for (u1, v1), c1 in t.twist_terms(s2, w).items():
                    for (u2, v2), c2 in t.twist_terms(s1, u1).items():
                        k = (u2, v2 + v1)
                        rhs[k] = rhs.get(k, 0.0 + 0.0j) + c1 * c2
                r = _dict_diff(lhs, rhs)
                if r > worst:
                    worst = r
                if r > t.tolerance and witness is None:
                    witness = f"law2(s1={_fmt_star(t, s1)},s2={_fmt_star(t, s2)},w={_fmt_plain(t, w)})"
    passed = worst <= t.tolerance
    return CheckReport("twist-axioms", passed, worst, None if passed else witness)


def _fmt_plain(t: TwistSpec, w: tuple[int, ...]) -> str:
    return ".".join(t.generators[i].name for i in w) if w else "1"


def _fmt_star(t: TwistSpec, s: tuple[int, ...]) -> str:
    return ".".join(t.generators[i].name + "*" for i in s) if s else "1"


def check_star_twist(t: TwistSpec, max_len: int) -> CheckReport:
    """(tau(b* (x) a))* == tau(a* (x) b) on all word pairs up to ``max_len``.

    Needs a Hermitian pairing and unimodular transposition factors; a
    lopsided pairing shows up as a conjugate-transpose mismatch.
    """
    words = _index_words(t.n, max_len)
    worst, witness = 0.0, None
    for s in words:
        for w in words:
            lhs: TermDict = {}
            for (u, v), c in t.twist_terms(s, w).items():
                k = (tuple(reversed(v)), tuple(reversed(u)))
                lhs[k] = lhs.get(k, 0.0 + 0.0j) + c.conjugate()
            rhs = t.twist_terms(tuple(reversed(w)), tuple(reversed(s)))
            r = _dict_diff(lhs, rhs)
            if r > worst:
                worst = r
            if r > t.tolerance and witness is None:
                witness = f"(s={_fmt_star(t, s)},w={_fmt_plain(t, w)})"
    passed = worst <= t.tolerance
    return CheckReport("star-twist", passed, worst, None if passed else witness)


@dataclass(frozen=True)
class IffReport:
    """Paired outcome of the axiom check and the associativity sweep."""

    axioms: CheckReport
    associative: bool
    assoc_residual: float
    assoc_witness: str | None
    consistent: bool

    def __bool__(self) -> bool:
        return self.consistent

    def line(self) -> str:
        verdict = "PASS" if self.consistent else "FAIL"
        ax = "PASS" if self.axioms.passed else "FAIL"
        mult = "yes" if self.associative else "no"
        witness = self.assoc_witness if self.assoc_witness is not None else "-"
        return (
            f"CHECK associativity-iff {verdict} axioms={ax} associative={mult} "
            f"residual={fmt_float(self.assoc_residual)} witness={witness}"
        )


def _normal_basis(t: TwistSpec, max_len: int) -> list[TermKey]:
    out: list[TermKey] = []
    for total in range(max_len + 1):
        for k in range(total + 1):
            for u in itertools.product(range(t.n), repeat=k):
                for v in itertools.product(range(t.n), repeat=total - k):
                    out.append((u, v))
    return out


def verify_associativity_iff_twist(t: TwistSpec, max_len: int) -> IffReport:
    """Cross-check the interchange laws against product associativity.

    The sweep restricts the left factor to pure annihilation words and the
    right factor to pure creation words: an unstarred prefix of the left
    factor and a starred suffix of the right factor pass through both
    association orders untouched (they never enter the twist), so the
    restricted triples decide associativity for all word triples of the
    same length.
    """
    axioms = check_twist_axioms(t, max_len)
    basis = _normal_basis(t, max_len)
    lefts = [key for key in basis if not key[0] and key[1]]
    rights = [key for key in basis if not key[1] and key[0]]
    worst, witness = 0.0, None
    for q in basis:
        q_dict = {q: 1.0 + 0.0j}
        qr = {r: _mul_terms(t, q_dict, {r: 1.0 + 0.0j}) for r in rights}
        for p in lefts:
            p_dict = {p: 1.0 + 0.0j}
            pq = _mul_terms(t, p_dict, q_dict)
            for r in rights:
                lhs = _mul_terms(t, pq, {r: 1.0 + 0.0j})
                rhs = _mul_terms(t, p_dict, qr[r])
                diff = _dict_diff(lhs, rhs)
                if diff > worst:
                    worst = diff
                if diff > t.tolerance and witness is None:
                    witness = (
                        f"({_fmt_star(t, p[1])},{_fmt_key(t, q)},{_fmt_plain(t, r[0])})"
                    )
        if witness is not None:
            break
    associative = worst <= t.tolerance
    consistent = axioms.passed == associative
    return IffReport(axioms, associative, worst, witness, consistent)


def _fmt_key(t: TwistSpec, key: TermKey) -> str:
    u, v = key
    if not u and not v:
        return "1"
    parts = [t.generators[i].name for i in u]
    parts += [t.generators[i].name + "*" for i in v]
    return ".".join(parts)
