"""
Finite groups with explicit element arithmetic.

Elements are the integers 0..n-1 and 0 is always the identity. Small groups
keep a dense Cayley table; larger ones keep a vectorized multiplication
function and produce table rows on demand.
"""

from __future__ import annotations

import hashlib
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
from loguru import logger
from numpy.typing import NDArray
from sympy import factorint

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import CapExceeded, InvalidParameters

IndexArray = NDArray[np.int64]
MulFunction = Callable[[IndexArray, IndexArray], IndexArray]

# Rows multiplied per block when a dense table is filled from a multiplication function
TABLE_BLOCK_ROWS = 256
# Rows sampled for the Latin-square check of structured groups
LATIN_SAMPLE_ROWS = 512
# Triples per randomized associativity batch
ASSOCIATIVITY_BATCH = 100_000


@dataclass
class Provenance:
    """Construction record of a group: how it was built and which named pieces it carries."""

    kind: str
    description: str = ""
    factors: tuple[FiniteGroup, ...] = ()
    embeddings: dict[str, IndexArray] = field(default_factory=dict)
    named: dict[str, NDArray[np.bool_]] = field(default_factory=dict)
    named_groups: dict[str, FiniteGroup] = field(default_factory=dict)
    data: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


class FiniteGroup:
    """
    A finite group on the element indices 0..order-1.

    The contract is the table lookup ``table[a][b] = a*b``; ``mul_arrays``
    evaluates it for whole index arrays without materializing the table
    when the group is too large for a dense one.
    """

    def __init__(
        self,
        order: int,
        *,
        table: NDArray[np.integer] | None = None,
        mul: MulFunction | None = None,
        generators: Sequence[int] = (),
        labels: Sequence[str] | None = None,
        provenance: Provenance | None = None,
    ):
        if order <= 0:
            raise InvalidParameters("Group order must be positive", {"order": order})
        if order > settings.ORDER_CAP:
            raise CapExceeded("group order", order, settings.ORDER_CAP)
        if table is None and mul is None:
            raise InvalidParameters("A group needs a table or a multiplication function")

        self.order = int(order)
        self._mul = mul
        self._table: NDArray[np.int32] | None = None
        if table is not None:
            self._table = np.ascontiguousarray(table, dtype=np.int32)
        elif self.order <= settings.DENSE_TABLE_CAP:
            self._table = self._fill_table()

        self.labels = list(labels) if labels is not None else None
        self.provenance = provenance or Provenance(kind="table")
        self.cache: dict[Any, Any] = {}
        self.generators: tuple[int, ...] = tuple(int(g) for g in generators if int(g) != 0)
        if not self.generators and self.order > 1:
            self.generators = self._greedy_generators()

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    @property
    def is_dense(self) -> bool:
        """Whether the full Cayley table is stored."""
        return self._table is not None

    @property
    def elements(self) -> IndexArray:
        return np.arange(self.order, dtype=np.int64)

    @property
    def table(self) -> NDArray[np.int32]:
        """The dense Cayley table; raises CapExceeded above the dense cap."""
        if self._table is None:
            raise CapExceeded("dense Cayley table", self.order, settings.DENSE_TABLE_CAP)
        return self._table

    def mul_arrays(self, a: Any, b: Any) -> IndexArray:
        """Elementwise product of two broadcastable index arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._table is not None:
            return self._table[a, b].astype(np.int64, copy=False)
        a, b = np.broadcast_arrays(a, b)
        shape = a.shape
        result = self._mul(a.ravel(), b.ravel())
        return np.asarray(result, dtype=np.int64).reshape(shape)

    def mul(self, a: int, b: int) -> int:
        if self._table is not None:
            return int(self._table[a, b])
        return int(self.mul_arrays(np.array([a]), np.array([b]))[0])

    def row(self, a: int) -> IndexArray:
        """All products a*x."""
        return self.mul_arrays(a, self.elements)

    def right_multiplication(self, g: int) -> IndexArray:
        """The permutation x -> x*g of the element indices, cached per g."""
        key = ("rmul", int(g))
        perm = self.cache.get(key)
        if perm is None:
            perm = self.mul_arrays(self.elements, g)
            self.cache[key] = perm
        return perm

    def power_arrays(self, xs: Any, ks: Any) -> IndexArray:
        """Elementwise powers x**k by square-and-multiply; negative k uses inverses."""
        xs_b, ks_b = np.broadcast_arrays(
            np.asarray(xs, dtype=np.int64), np.asarray(ks, dtype=np.int64)
        )
        base = np.array(xs_b, dtype=np.int64)
        exps = np.array(ks_b, dtype=np.int64)
        negative = exps < 0
        if negative.any():
            base[negative] = self.inv[base[negative]]
            exps = np.abs(exps)
        result = np.zeros_like(base)
        while True:
            odd = (exps & 1).astype(bool)
            if odd.any():
                result[odd] = self.mul_arrays(result[odd], base[odd])
            exps >>= 1
            more = exps > 0
            if not more.any():
                break
            base[more] = self.mul_arrays(base[more], base[more])
        return result

    def power(self, x: int, k: int) -> int:
        return int(self.power_arrays(np.array([x]), np.array([k]))[0])

    @cached_property
    def elem_order(self) -> IndexArray:
        """Order of every element, found by stripping primes off the group order."""
        n = self.order
        elems = self.elements
        orders = np.full(n, n, dtype=np.int64)
        for p, multiplicity in factorint(n).items():
            for _ in range(multiplicity):
                divisible = orders % p == 0
                candidate = np.where(divisible, orders // p, orders)
                trivial = divisible & (self.power_arrays(elems, candidate) == 0)
                orders = np.where(trivial, candidate, orders)
        return orders

    @cached_property
    def inv(self) -> IndexArray:
        return self.power_arrays(self.elements, self.elem_order - 1)

    def conjugate_arrays(self, xs: Any, g: int) -> IndexArray:
        """The conjugates g^-1 x g."""
        return self.mul_arrays(self.mul_arrays(self.inv[g], xs), g)

    def commutator_arrays(self, xs: Any, ys: Any) -> IndexArray:
        """The commutators x^-1 y^-1 x y."""
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        left = self.mul_arrays(self.inv[xs], self.inv[ys])
        return self.mul_arrays(self.mul_arrays(left, xs), ys)

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(self.elem_order))

    @cached_property
    def order_histogram(self) -> dict[int, int]:
        values, counts = np.unique(self.elem_order, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    # ------------------------------------------------------------------
    # Generation
    # ------------------------------------------------------------------

    def closure_mask(
        self,
        gens: Sequence[int] | IndexArray,
        seed: NDArray[np.bool_] | None = None,
    ) -> NDArray[np.bool_]:
        """
        Member mask of the subgroup generated by ``gens``.

        ``seed`` may carry a subgroup already known to lie in the result;
        its elements start the breadth-first search.
        """
        gens = np.unique(np.asarray(gens, dtype=np.int64))
        gens = gens[gens != 0]
        mask = np.zeros(self.order, dtype=bool)
        mask[0] = True
        if seed is not None:
            mask |= seed
        frontier = np.flatnonzero(mask)
        if gens.size == 0:
            return mask
        while frontier.size:
            products = self.mul_arrays(frontier[:, None], gens[None, :]).ravel()
            fresh = np.unique(products[~mask[products]])
            mask[fresh] = True
            frontier = fresh
        return mask

    def _greedy_generators(self) -> tuple[int, ...]:
        by_order = np.lexsort((self.elements, -self.elem_order))
        gens: list[int] = []
        mask = np.zeros(self.order, dtype=bool)
        mask[0] = True
        for x in by_order:
            if not mask[x]:
                gens.append(int(x))
                mask = self.closure_mask(gens)
                if mask.all():
                    break
        return tuple(gens)

    # ------------------------------------------------------------------
    # Invariants and identity
    # ------------------------------------------------------------------

    def _fill_table(self) -> NDArray[np.int32]:
        n = self.order
        table = np.empty((n, n), dtype=np.int32)
        cols = np.arange(n, dtype=np.int64)
        for start in range(0, n, TABLE_BLOCK_ROWS):
            rows = np.arange(start, min(start + TABLE_BLOCK_ROWS, n), dtype=np.int64)
            a = np.repeat(rows, n)
            b = np.tile(cols, rows.size)
            table[start : start + rows.size] = np.asarray(self._mul(a, b)).reshape(rows.size, n)
        return table

    def validate(self) -> None:
        """
        Check identity, Latin-square, inverse and associativity invariants.

        Raises:
            InvalidParameters: naming the first invariant that fails
        """
        n = self.order
        elems = self.elements
        if not np.array_equal(self.mul_arrays(0, elems), elems) or not np.array_equal(
            self.mul_arrays(elems, 0), elems
        ):
            raise InvalidParameters("index 0 is not the identity")

        if self.is_dense:
            rows = elems
        else:
            rows = np.random.default_rng(0).choice(n, size=min(n, LATIN_SAMPLE_ROWS), replace=False)
        for a in rows:
            if not np.array_equal(np.sort(self.mul_arrays(a, elems)), elems):
                raise InvalidParameters("table row is not a permutation", {"row": int(a)})
            if not np.array_equal(np.sort(self.mul_arrays(elems, a)), elems):
                raise InvalidParameters("table column is not a permutation", {"column": int(a)})

        if not np.all(self.mul_arrays(elems, self.inv) == 0):
            raise InvalidParameters("inverse array is inconsistent")

        if n <= settings.ASSOCIATIVITY_FULL_CHECK:
            # (x s) y = x (s y) on a generating set s forces associativity everywhere
            if not self.closure_mask(self.generators).all():
                raise InvalidParameters("stored generators do not generate the group")
            for s in self.generators:
                xs = self.mul_arrays(elems, s)
                left = self.mul_arrays(xs[:, None], elems[None, :])
                right = self.mul_arrays(elems[:, None], self.mul_arrays(s, elems)[None, :])
                if not np.array_equal(left, right):
                    raise InvalidParameters("multiplication is not associative", {"generator": s})
        else:
            rng = np.random.default_rng(0)
            remaining = settings.ASSOCIATIVITY_SAMPLES
            while remaining > 0:
                size = min(remaining, ASSOCIATIVITY_BATCH)
                a, b, c = (rng.integers(0, n, size) for _ in range(3))
                left = self.mul_arrays(self.mul_arrays(a, b), c)
                right = self.mul_arrays(a, self.mul_arrays(b, c))
                if not np.array_equal(left, right):
                    raise InvalidParameters("multiplication is not associative (sampled)")
                remaining -= size
        logger.debug("Group invariants verified", order=n, dense=self.is_dense)

    @cached_property
    def content_hash(self) -> str:
        """SHA-256 over the table, or over the generator permutations when not dense."""
        digest = hashlib.sha256()
        digest.update(str(self.order).encode())
        if self.is_dense:
            digest.update(self.table.astype(np.int64).tobytes())
        else:
            for g in self.generators:
                digest.update(self.right_multiplication(g).tobytes())
        return digest.hexdigest()

    def label(self, x: int) -> str:
        if self.labels is not None:
            return self.labels[x]
        return str(x)

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order}, kind={self.provenance.kind!r})"
