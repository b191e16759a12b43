"""Spectral sets: finitely described subsets of the integers.

A SpectralSet wraps a descriptor tree (explicit lists, cofinite complements,
unions of arithmetic progressions, named lacunary families and the algebra
over them). Nothing is ever materialized as an infinite collection;
enumeration always happens inside a finite band.
"""

import logging
import math
import re
from functools import lru_cache, reduce
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .exceptions import DescriptorSyntaxError, PreconditionError
from .lac_config import DEFAULT_BAND

logger = logging.getLogger(__name__)

Half = Literal["Z", "Zplus", "Zminus"]

TAG_RIESZ = "riesz-by-citation"
TAG_DSET = "dset-by-citation"
TAG_PERIODIC = "periodic"
TAG_COFINITE_Z = "cofinite-in-Z"
TAG_COFINITE_ZPLUS = "cofinite-in-Zplus"


class _Node(BaseModel):
    model_config = ConfigDict(frozen=True)

    def contains(self, k: int) -> bool:
        raise NotImplementedError

    def canonical(self) -> str:
        raise NotImplementedError


def _in_half(k: int, half: str) -> bool:
    if half == "Zplus":
        return k >= 0
    if half == "Zminus":
        return k < 0
    return True


class Explicit(_Node):
    kind: Literal["explicit"] = "explicit"
    members: tuple[int, ...] = ()

    @field_validator("members")
    @classmethod
    def _sorted_unique(cls, v):
        return tuple(sorted(set(v)))

    def contains(self, k: int) -> bool:
        return k in self.members

    def canonical(self) -> str:
        return "{" + ",".join(str(k) for k in self.members) + "}"


class CofiniteComplement(_Node):
    """Z (or Z₊) minus finitely many pairwise distinct integers."""

    kind: Literal["cofinite"] = "cofinite"
    excluded: tuple[int, ...] = ()
    universe: Literal["Z", "Zplus"] = "Z"

    @field_validator("excluded")
    @classmethod
    def _distinct(cls, v):
        if len(set(v)) != len(v):
            raise ValueError("excluded integers must be pairwise distinct")
        return tuple(sorted(v))

    def contains(self, k: int) -> bool:
        return _in_half(k, self.universe) and k not in self.excluded

    def canonical(self) -> str:
        return f"{self.universe} \\ " + "{" + ",".join(str(k) for k in self.excluded) + "}"


class APUnion(_Node):
    """Union of residue classes r mod n, optionally cut to a half-line."""

    kind: Literal["ap"] = "ap"
    progressions: tuple[tuple[int, int], ...]
    half: Half = "Z"

    @field_validator("progressions")
    @classmethod
    def _normalize(cls, v):
        out = set()
        for modulus, residue in v:
            if modulus < 1:
                raise ValueError(f"modulus must be >= 1, got {modulus}")
            out.add((modulus, residue % modulus))
        if not out:
            raise ValueError("an AP union needs at least one progression")
        return tuple(sorted(out))

    def contains(self, k: int) -> bool:
        return _in_half(k, self.half) and any(k % n == r for n, r in self.progressions)

    def lcm(self) -> int:
        return reduce(math.lcm, (n for n, _ in self.progressions), 1)

    def canonical(self) -> str:
        suffix = "" if self.half == "Z" else self.half[1:]
        if len(self.progressions) == 1 and self.progressions[0][1] == 0:
            n = self.progressions[0][0]
            return ("" if n == 1 else str(n)) + "Z" + suffix
        body = "|".join(f"AP({n},{r})" for n, r in self.progressions)
        if self.half == "Z":
            return body
        if len(self.progressions) > 1:
            body = f"({body})"
        return f"{body} & {self.half}"


class NamedFamily(_Node):
    """Lacunary families: -n^k, n^k, n^(2^k), -k^2, -p."""

    kind: Literal["named"] = "named"
    family: Literal["negpow", "pow", "powpow", "negsquares", "negprimes"]
    base: int = 2

    @field_validator("base")
    @classmethod
    def _base(cls, v):
        if v < 2:
            raise ValueError(f"family base must be >= 2, got {v}")
        return v

    def contains(self, k: int) -> bool:
        if self.family == "negpow":
            return k < 0 and _is_power(-k, self.base, min_exp=1)
        if self.family == "pow":
            return k > 0 and _is_power(k, self.base, min_exp=0)
        if self.family == "powpow":
            value = self.base
            while value < k:
                value *= value
            return k > 0 and value == k
        if self.family == "negsquares":
            return k < 0 and math.isqrt(-k) ** 2 == -k
        return k < 0 and _is_prime(-k)

    def canonical(self) -> str:
        if self.family in ("negsquares", "negprimes"):
            return self.family
        return f"{self.family}({self.base})"


class SetUnion(_Node):
    kind: Literal["union"] = "union"
    parts: tuple["Descriptor", ...]

    def contains(self, k: int) -> bool:
        return any(p.contains(k) for p in self.parts)

    def canonical(self) -> str:
        return " | ".join(p.canonical() for p in self.parts)


class SetDifference(_Node):
    kind: Literal["difference"] = "difference"
    left: "Descriptor"
    right: "Descriptor"

    def contains(self, k: int) -> bool:
        return self.left.contains(k) and not self.right.contains(k)

    def canonical(self) -> str:
        left = _wrap(self.left, (SetUnion,))
        right = _wrap(self.right, (SetUnion, SetDifference, BandRestricted, CofiniteComplement))
        return f"{left} \\ {right}"


class Shifted(_Node):
    kind: Literal["shift"] = "shift"
    inner: "Descriptor"
    offset: int

    def contains(self, k: int) -> bool:
        return self.inner.contains(k - self.offset)

    def canonical(self) -> str:
        return f"shift({self.inner.canonical()}, {self.offset})"


class Negated(_Node):
    kind: Literal["negation"] = "negation"
    inner: "Descriptor"

    def contains(self, k: int) -> bool:
        return self.inner.contains(-k)

    def canonical(self) -> str:
        return f"-({self.inner.canonical()})"


class BandRestricted(_Node):
    kind: Literal["band"] = "band"
    inner: "Descriptor"
    lo: int
    hi: int

    def contains(self, k: int) -> bool:
        return self.lo <= k <= self.hi and self.inner.contains(k)

    def canonical(self) -> str:
        inner = _wrap(self.inner, (SetUnion, CofiniteComplement))
        return f"{inner} & [{self.lo},{self.hi}]"


Descriptor = Annotated[
    Union[
        Explicit,
        CofiniteComplement,
        APUnion,
        NamedFamily,
        SetUnion,
        SetDifference,
        Shifted,
        Negated,
        BandRestricted,
    ],
    Field(discriminator="kind"),
]

for _model in (SetUnion, SetDifference, Shifted, Negated, BandRestricted):
    _model.model_rebuild()


def _wrap(node: _Node, kinds: tuple) -> str:
    text = node.canonical()
    if isinstance(node, kinds) or (isinstance(node, APUnion) and " & " in text):
        return f"({text})"
    return text


class SpectralSet(BaseModel):
    """A finitely described Λ ⊂ Z together with its default band [-B, B]."""

    model_config = ConfigDict(frozen=True)

    descriptor: Descriptor
    band_default: int = DEFAULT_BAND

    @classmethod
    def parse(cls, text: str, band_default: int = DEFAULT_BAND) -> "SpectralSet":
        return cls(descriptor=_Parser(text).parse(), band_default=band_default)

    def contains(self, k: int) -> bool:
        return self.descriptor.contains(int(k))

    def canonical(self) -> str:
        return self.descriptor.canonical()

    def default_band(self) -> tuple[int, int]:
        return (-self.band_default, self.band_default)

    def members_in_band(self, lo: int, hi: int) -> list[int]:
        return [k for k in range(lo, hi + 1) if self.descriptor.contains(k)]

    def __str__(self):
        return self.canonical()


class PeriodResult(BaseModel):
    period: Optional[int] = None
    exact: bool
    method: Literal["residue-arithmetic", "structural", "band-verified"]
    band: Optional[tuple[int, int]] = None


class SetInfo(BaseModel):
    canonical: str
    band_default: int
    tags: list[str]
    period: PeriodResult
    complement_in_default_band: list[int]
    excluded_from_Z: Optional[list[int]] = None
    excluded_from_Zplus: Optional[list[int]] = None


# Builders. They normalize where a simpler descriptor is equivalent, so the
# parser and canonical form agree.


def union(*parts: _Node) -> _Node:
    flat: list[_Node] = []
    for part in parts:
        flat.extend(part.parts if isinstance(part, SetUnion) else (part,))
    merged: list[_Node] = []
    for part in flat:
        for i, seen in enumerate(merged):
            if isinstance(part, APUnion) and isinstance(seen, APUnion) and part.half == seen.half:
                merged[i] = APUnion(progressions=seen.progressions + part.progressions, half=seen.half)
                break
            if isinstance(part, Explicit) and isinstance(seen, Explicit):
                merged[i] = Explicit(members=seen.members + part.members)
                break
        else:
            merged.append(part)
    return merged[0] if len(merged) == 1 else SetUnion(parts=tuple(merged))


def difference(left: _Node, right: _Node) -> _Node:
    if isinstance(right, Explicit):
        universe = _universe_of(left)
        if universe is not None:
            dropped = {k for k in right.members if _in_half(k, universe)}
            base = left.excluded if isinstance(left, CofiniteComplement) else ()
            return CofiniteComplement(excluded=tuple(sorted(dropped | set(base))), universe=universe)
    return SetDifference(left=left, right=right)


def shift(node: _Node, offset: int) -> _Node:
    return Shifted(inner=node, offset=offset)


def negate(node: _Node) -> _Node:
    return Negated(inner=node)


def restrict(node: _Node, lo: int, hi: int) -> _Node:
    if lo > hi:
        raise PreconditionError(f"empty band [{lo},{hi}]")
    return BandRestricted(inner=node, lo=lo, hi=hi)


def _universe_of(node: _Node) -> Optional[str]:
    if isinstance(node, CofiniteComplement):
        return node.universe
    if isinstance(node, APUnion) and node.progressions == ((1, 0),) and node.half != "Zminus":
        return node.half
    return None


# Operations


def contains(spectral_set: SpectralSet, k: int) -> bool:
    return spectral_set.contains(k)


def complement_in_band(spectral_set: SpectralSet, band: tuple[int, int]) -> list[int]:
    lo, hi = band
    return [k for k in range(lo, hi + 1) if not spectral_set.contains(k)]


def period_of(spectral_set: SpectralSet, max_period: int) -> PeriodResult:
    """Minimal n <= max_period with Λ + n = Λ.

    Exact for descriptors that reduce to residue classes; otherwise the
    shift invariance is checked on the default band only.
    """
    if max_period < 1:
        raise PreconditionError(f"max_period must be >= 1, got {max_period}")
    node = spectral_set.descriptor

    residues = _residues(node)
    if residues is not None:
        modulus, classes = residues
        period = _minimal_period(modulus, classes)
        return PeriodResult(
            period=period if period <= max_period else None,
            exact=True,
            method="residue-arithmetic",
        )

    if _structurally_aperiodic(node):
        return PeriodResult(period=None, exact=True, method="structural")

    lo, hi = spectral_set.default_band()
    members = [spectral_set.contains(k) for k in range(lo, hi + 1)]
    for n in range(1, min(max_period, hi - lo) + 1):
        if all(members[i] == members[i + n] for i in range(len(members) - n)):
            logger.warning(f"period {n} of {spectral_set} is only band-verified on [{lo},{hi}]")
            return PeriodResult(period=n, exact=False, method="band-verified", band=(lo, hi))
    return PeriodResult(period=None, exact=False, method="band-verified", band=(lo, hi))


def _residues(node: _Node) -> Optional[tuple[int, frozenset]]:
    if isinstance(node, APUnion):
        if node.half != "Z":
            return None
        modulus = node.lcm()
        classes = {(r + n * t) % modulus for n, r in node.progressions for t in range(modulus // n)}
        return modulus, frozenset(classes)
    if isinstance(node, CofiniteComplement) and node.universe == "Z" and not node.excluded:
        return 1, frozenset({0})
    if isinstance(node, Explicit) and not node.members:
        return 1, frozenset()
    if isinstance(node, Shifted):
        inner = _residues(node.inner)
        if inner is None:
            return None
        modulus, classes = inner
        return modulus, frozenset((r + node.offset) % modulus for r in classes)
    if isinstance(node, Negated):
        inner = _residues(node.inner)
        if inner is None:
            return None
        modulus, classes = inner
        return modulus, frozenset((-r) % modulus for r in classes)
    if isinstance(node, (SetUnion, SetDifference)):
        parts = node.parts if isinstance(node, SetUnion) else (node.left, node.right)
        found = [_residues(p) for p in parts]
        if any(f is None for f in found):
            return None
        modulus = reduce(math.lcm, (m for m, _ in found), 1)
        lifted = [
            {r for r in range(modulus) if r % m in classes}
            for m, classes in found
        ]
        if isinstance(node, SetUnion):
            return modulus, frozenset(set().union(*lifted))
        return modulus, frozenset(lifted[0] - lifted[1])
    return None


def _minimal_period(modulus: int, classes: frozenset) -> int:
    for n in range(1, modulus + 1):
        if modulus % n == 0 and all((r + n) % modulus in classes for r in classes):
            return n
    return modulus


def _structurally_aperiodic(node: _Node) -> bool:
    # Nonempty finite sets, cofinite sets with a nonempty complement and
    # nonempty half-line cuts are never invariant under a nonzero shift.
    if isinstance(node, Explicit):
        return bool(node.members)
    if isinstance(node, CofiniteComplement):
        return bool(node.excluded) or node.universe == "Zplus"
    if isinstance(node, APUnion):
        return node.half != "Z"
    if isinstance(node, BandRestricted):
        return any(node.inner.contains(k) for k in range(node.lo, node.hi + 1))
    return False


def finite_members(node: _Node) -> Optional[tuple[int, ...]]:
    """Members of a descriptor known to be finite, else None."""
    if isinstance(node, Explicit):
        return node.members
    if isinstance(node, BandRestricted):
        return tuple(k for k in range(node.lo, node.hi + 1) if node.inner.contains(k))
    if isinstance(node, SetUnion):
        found = [finite_members(p) for p in node.parts]
        if any(f is None for f in found):
            return None
        return tuple(sorted(set().union(*found)))
    if isinstance(node, Shifted):
        inner = finite_members(node.inner)
        return None if inner is None else tuple(sorted(k + node.offset for k in inner))
    if isinstance(node, Negated):
        inner = finite_members(node.inner)
        return None if inner is None else tuple(sorted(-k for k in inner))
    return None


def cofinite_excluded(spectral_set: SpectralSet, universe: str = "Z") -> Optional[list[int]]:
    """The finite list universe \\ Λ when the descriptor shows it, else None."""
    found = _excluded(spectral_set.descriptor, universe)
    return None if found is None else sorted(found)


def _excluded(node: _Node, universe: str) -> Optional[set]:
    if _universe_of(node) == universe:
        return set(node.excluded) if isinstance(node, CofiniteComplement) else set()
    if isinstance(node, SetDifference):
        left = _excluded(node.left, universe)
        right = finite_members(node.right)
        if left is None or right is None:
            return None
        return left | {k for k in right if _in_half(k, universe)}
    if isinstance(node, SetUnion):
        for i, part in enumerate(node.parts):
            base = _excluded(part, universe)
            if base is None:
                continue
            others = [finite_members(p) for j, p in enumerate(node.parts) if j != i]
            if any(o is None for o in others):
                continue
            inside = set().union(*others) if others else set()
            if universe == "Zplus" and any(k < 0 for k in inside):
                continue
            return base - inside
    return None


def is_zplus(node: _Node) -> bool:
    return _universe_of(node) == "Zplus" and not getattr(node, "excluded", ())


def within_zplus(node: _Node) -> bool:
    """Structural check that the descriptor only holds nonnegative integers."""
    if isinstance(node, (CofiniteComplement, APUnion)):
        return _universe_of(node) == "Zplus" or getattr(node, "half", None) == "Zplus" or getattr(node, "universe", None) == "Zplus"
    if isinstance(node, Explicit):
        return all(k >= 0 for k in node.members)
    if isinstance(node, NamedFamily):
        return node.family in ("pow", "powpow")
    if isinstance(node, SetDifference):
        return within_zplus(node.left)
    if isinstance(node, BandRestricted):
        return node.lo >= 0 or within_zplus(node.inner)
    if isinstance(node, SetUnion):
        return all(within_zplus(p) for p in node.parts)
    if isinstance(node, Shifted):
        return node.offset >= 0 and within_zplus(node.inner)
    return False


def _named_with_zplus(node: _Node) -> Optional[NamedFamily]:
    if isinstance(node, SetUnion) and len(node.parts) == 2:
        a, b = node.parts
        if isinstance(b, NamedFamily) and is_zplus(a):
            a, b = b, a
        if isinstance(a, NamedFamily) and is_zplus(b):
            return a
    return None


def classify_families(spectral_set: SpectralSet) -> list[str]:
    """Metadata tags. The *-by-citation tags are literature facts, not proofs."""
    node = spectral_set.descriptor
    tags = []
    named = _named_with_zplus(node)

    riesz = within_zplus(node) or (
        named is not None
        and (named.family in ("negsquares", "negprimes") or (named.family == "negpow" and named.base == 2))
    )
    if riesz:
        tags.append(TAG_RIESZ)
    if is_zplus(node) or (named is not None and named.family == "negpow"):
        tags.append(TAG_DSET)

    period = period_of(spectral_set, spectral_set.band_default)
    if period.exact and period.period is not None:
        tags.append(TAG_PERIODIC)
    if cofinite_excluded(spectral_set, "Z") is not None:
        tags.append(TAG_COFINITE_Z)
    if cofinite_excluded(spectral_set, "Zplus") is not None:
        tags.append(TAG_COFINITE_ZPLUS)
    return tags


def describe(spectral_set: SpectralSet) -> SetInfo:
    excluded_z = cofinite_excluded(spectral_set, "Z")
    excluded_zplus = cofinite_excluded(spectral_set, "Zplus")
    return SetInfo(
        canonical=spectral_set.canonical(),
        band_default=spectral_set.band_default,
        tags=classify_families(spectral_set),
        period=period_of(spectral_set, spectral_set.band_default),
        complement_in_default_band=complement_in_band(spectral_set, spectral_set.default_band()),
        excluded_from_Z=excluded_z,
        excluded_from_Zplus=excluded_zplus,
    )


def parse_descriptor(text: str, band_default: int = DEFAULT_BAND) -> SpectralSet:
    return SpectralSet.parse(text, band_default=band_default)


# Number theory helpers


def _is_power(m: int, base: int, min_exp: int) -> bool:
    exponent = 0
    while m > 1 and m % base == 0:
        m //= base
        exponent += 1
    return m == 1 and exponent >= min_exp


@lru_cache(maxsize=8)
def _sieve(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return is_prime


def _is_prime(m: int) -> bool:
    limit = max(1024, 1 << m.bit_length())
    return bool(_sieve(limit)[m])


# Descriptor grammar

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\\|[|+&\-(){}\[\],]))")
_HALVES = {"Z": "Z", "Zplus": "Zplus", "Zminus": "Zminus"}


class _Parser:
    """Recursive descent over the descriptor grammar.

    expr  := term (('|' | '+') term)*
    term  := unary (('\\' unary) | ('&' restriction))*
    unary := '-' unary | atom
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            match = _TOKEN.match(stripped, pos)
            if not match or match.end() == pos:
                raise DescriptorSyntaxError("unexpected character", text, pos)
            start = match.start(match.lastindex)
            self.tokens.append((match.group(match.lastindex), start, match.end()))
            pos = match.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def _pos(self):
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def _fail(self, message: str):
        raise DescriptorSyntaxError(message, self.text, self._pos())

    def _take(self, expected: str = None):
        token = self._peek()
        if token is None or (expected is not None and token != expected):
            self._fail(f"expected {expected or 'a token'}, found {token or 'end of input'}")
        self.i += 1
        return token

    def parse(self) -> _Node:
        node = self._expr()
        if self._peek() is not None:
            self._fail(f"unexpected {self._peek()!r}")
        return node

    def _expr(self) -> _Node:
        parts = [self._term()]
        while self._peek() in ("|", "+"):
            self._take()
            parts.append(self._term())
        return union(*parts)

    def _term(self) -> _Node:
        node = self._unary()
        while self._peek() in ("\\", "&"):
            if self._take() == "\\":
                node = difference(node, self._unary())
            else:
                node = self._restriction(node)
        return node

    def _restriction(self, node: _Node) -> _Node:
        if self._peek() in ("Zplus", "Zminus"):
            half = self._take()
            if not isinstance(node, APUnion) or node.half != "Z":
                self._fail("half-line restriction applies to AP unions over Z only")
            return APUnion(progressions=node.progressions, half=half)
        self._take("[")
        lo = self._int()
        self._take(",")
        hi = self._int()
        self._take("]")
        if lo > hi:
            self._fail(f"empty band [{lo},{hi}]")
        return restrict(node, lo, hi)

    def _unary(self) -> _Node:
        if self._peek() == "-":
            self._take()
            return negate(self._unary())
        return self._atom()

    def _int(self) -> int:
        sign = 1
        if self._peek() == "-":
            self._take()
            sign = -1
        token = self._peek()
        if token is None or not token.isdigit():
            self._fail("expected an integer")
        self._take()
        return sign * int(token)

    def _atom(self) -> _Node:
        token = self._peek()
        if token is None:
            self._fail("expected a set, found end of input")
        if token == "(":
            self._take()
            node = self._expr()
            self._take(")")
            return node
        if token == "{":
            self._take()
            members = []
            if self._peek() != "}":
                members.append(self._int())
                while self._peek() == ",":
                    self._take()
                    members.append(self._int())
            self._take("}")
            return Explicit(members=tuple(members))
        if token.isdigit():
            _, _, end = self.tokens[self.i]
            self._take()
            nxt = self._peek()
            if nxt in _HALVES and self.tokens[self.i][1] == end:
                self._take()
                return APUnion(progressions=((int(token), 0),), half=_HALVES[nxt])
            self._fail("expected Z, Zplus or Zminus right after the modulus")
        if token in _HALVES:
            self._take()
            return APUnion(progressions=((1, 0),), half=_HALVES[token])
        if token == "AP":
            self._take()
            self._take("(")
            modulus = self._int()
            self._take(",")
            residue = self._int()
            self._take(")")
            if modulus < 1:
                self._fail("modulus must be >= 1")
            return APUnion(progressions=((modulus, residue),))
        if token == "shift":
            self._take()
            self._take("(")
            inner = self._expr()
            self._take(",")
            offset = self._int()
            self._take(")")
            return shift(inner, offset)
        if token in ("negsquares", "negprimes"):
            self._take()
            return NamedFamily(family=token)
        short = re.fullmatch(r"(negpow|pow|powpow)(\d+)", token)
        if short:
            self._take()
            return self._family(short.group(1), int(short.group(2)))
        if token in ("negpow", "pow", "powpow"):
            self._take()
            self._take("(")
            base = self._int()
            self._take(")")
            return self._family(token, base)
        self._fail(f"unknown set {token!r}")

    def _family(self, family: str, base: int) -> _Node:
        if base < 2:
            self._fail("family base must be >= 2")
        return NamedFamily(family=family, base=base)
