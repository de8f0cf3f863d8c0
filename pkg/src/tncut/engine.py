"""Contraction execution: slices, head vectors, and amplitude tables.

The head subtree is contracted once per slice assignment and the
results are summed into a single vector of length 2**n_c over the cut
indices; the tail subtree is contracted with its open output indices
kept (in blocks under a space cap when needed) and every amplitude is
an inner product of the two.  Fixing the closed-output bits s1 only
changes head tensor values, so a new s1 reuses the same network
topology and contraction tree.

Summation modes: ``fixed`` accumulates slice results along a balanced
binary tree over the assignment slots, so partial sums over aligned
power-of-two ranges compose bit-exactly into the full-range result;
``free`` is a plain running sum for throughput-minded callers who
tolerance-check instead.

Instrumentation is exact: every pairwise contraction of operands with
n_A and n_B exclusive and n_AB shared indices adds
2**(n_A + n_B + n_AB) to the multiplication counter, which is what the
underlying GEMM performs.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

from .network import TensorNetwork
from .ordering import ContractionTree, cut_indices, tree_to_doc, dumps_order
from .errors import (
    ProvenanceMismatch,
    RangeGap,
    RangeOutOfBounds,
    RangeOverlap,
    ShapeMismatch,
)

DTYPES = {"double": np.complex128, "single": np.complex64}


@dataclass
class EngineStats:
    multiplications: int = 0
    head_contractions: int = 0
    tail_contractions: int = 0
    steps_executed: int = 0


@dataclass
class HeadVector:
    s1: dict[int, int]
    data: np.ndarray  # length 2**n_c
    provenance: str
    cut_order: list[int]  # cut index ids, ascending; axis order of data
    n_e: int
    slice_range: tuple[int, int]
    mode: str
    sliced_indices: tuple[int, ...] = ()

    @property
    def n_c(self) -> int:
        return len(self.cut_order)


@dataclass
class AmplitudeTable:
    s1: dict[int, int]
    open_qubits: list[int]  # ascending; most significant s2 bit first
    amplitudes: np.ndarray  # length 2**n_open, s2 ascending
    layout_ids: list[int]
    circuit_sha256: str
    order_sha256: str
    precision: str
    mode: str

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def bitstring(self, mask: int) -> str:
        """Full layout bitstring with s1 and s2 spliced into place."""
        n2 = len(self.open_qubits)
        s2 = {
            q: (mask >> (n2 - 1 - i)) & 1 for i, q in enumerate(self.open_qubits)
        }
        bits = []
        for q in sorted(self.layout_ids):
            bits.append(str(s2[q] if q in s2 else self.s1[q]))
        return "".join(bits)

    def rows(self):
        for mask, amp in enumerate(self.amplitudes):
            yield self.bitstring(mask), complex(amp), float(abs(amp) ** 2)


# ---------------------------------------------------------------------------
# Core contraction

def _prepared_leaves(tn, leaf_ids, assignment, dtype):
    tensors = {}
    for nid in leaf_ids:
        node = tn.nodes[nid]
        data = node.data.astype(dtype, copy=False)
        ids = list(node.indices)
        for ix, bit in assignment.items():
            if ix in ids:
                ax = ids.index(ix)
                data = np.take(data, bit, axis=ax)
                del ids[ax]
        tensors[nid] = (data, ids)
    return tensors


def _contract_steps(tn, leaf_ids, steps, assignment, dtype, stats=None):
    """Run pairwise steps over prepared leaves; returns (tensor, ids)."""
    tensors = _prepared_leaves(tn, leaf_ids, assignment, dtype)
    for s in steps:
        if s.lhs not in tensors or s.rhs not in tensors:
            raise ShapeMismatch(f"step {s} references a missing operand")
        a, a_ids = tensors.pop(s.lhs)
        b, b_ids = tensors.pop(s.rhs)
        shared = [ix for ix in a_ids if ix in b_ids]
        if shared:
            ax_a = [a_ids.index(ix) for ix in shared]
            ax_b = [b_ids.index(ix) for ix in shared]
            out = np.tensordot(a, b, axes=(ax_a, ax_b))
        else:
            out = np.multiply.outer(a, b)  # tensordot mangles 0-d operands
        out_ids = [ix for ix in a_ids if ix not in b_ids] + [
            ix for ix in b_ids if ix not in a_ids
        ]
        if out.ndim != len(out_ids):
            raise ShapeMismatch(f"step {s}: rank {out.ndim} != {len(out_ids)} indices")
        tensors[s.out] = (out, out_ids)
        if stats is not None:
            stats.multiplications += 1 << (len(a_ids) + len(b_ids) - len(shared))
            stats.steps_executed += 1
    if len(tensors) != 1:
        raise ShapeMismatch(f"{len(tensors)} results left after contraction")
    (tensor, ids), = tensors.values()
    return tensor, ids


def contract_tree(
    tn: TensorNetwork,
    tree: ContractionTree,
    slice_assignment: dict[int, int],
    dtype=np.complex128,
    stats: EngineStats | None = None,
) -> np.ndarray:
    """Contract the whole tree with sliced indices pinned.

    Returns the root tensor with surviving (open) axes sorted by index
    id ascending.
    """
    tensor, ids = _contract_steps(
        tn, tree.leaves, tree.steps, slice_assignment, dtype, stats
    )
    if ids:
        order = sorted(range(len(ids)), key=lambda k: ids[k])
        tensor = np.transpose(tensor, order)
    return tensor


# ---------------------------------------------------------------------------
# Head / tail split helpers

def _split(tn, tree):
    """(head_leaves, head_steps, tail_leaves, tail_steps, cut index ids)."""
    if tree.first_cut is not None:
        head_leaves, tail_leaves = tree.head_tail_leaves()
        cut = cut_indices(tn, set(head_leaves), set(tail_leaves))
        return (
            sorted(head_leaves),
            tree.head_steps(),
            sorted(tail_leaves),
            tree.tail_steps(),
            cut,
        )
    if tn.open_output_indices:
        return [], [], sorted(tree.leaves), list(tree.steps), []
    return sorted(tree.leaves), list(tree.steps), [], [], []


def provenance_hash(
    tn: TensorNetwork,
    tree: ContractionTree,
    s1: dict[int, int],
    precision: str,
    mode: str,
    sliced_indices=(),
) -> str:
    circuit_sha = tn.circuit.sha256() if tn.circuit is not None else "none"
    order_doc = tree_to_doc(tree, circuit_sha256=circuit_sha,
                            slices=list(sliced_indices))
    s1_str = "".join(str(s1[q]) for q in sorted(s1)) or "-"
    payload = "|".join(
        [circuit_sha, hashlib.sha256(dumps_order(order_doc).encode()).hexdigest(),
         s1_str, precision, mode]
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def _fixed_tree_sum(chunks):
    """Balanced (binary-counter) summation over an iterable of arrays."""
    stack: list[tuple[int, np.ndarray]] = []  # (level, partial)
    for x in chunks:
        level = 0
        while stack and stack[-1][0] == level:
            _, prev = stack.pop()
            x = prev + x
            level += 1
        stack.append((level, x))
    if not stack:
        return None
    total = stack[0][1]
    for _, part in stack[1:]:
        total = total + part
    return total


def normalize_s1(tn: TensorNetwork, s1) -> dict[int, int]:
    closed = sorted(tn.fixed_output_bits)
    if s1 is None:
        return dict(tn.fixed_output_bits)
    if isinstance(s1, str):
        if s1 == "-" and not closed:
            return {}
        if len(s1) != len(closed):
            raise ProvenanceMismatch(
                f"s1 has {len(s1)} bits but {len(closed)} qubits are closed"
            )
        return {q: int(b) for q, b in zip(closed, s1)}
    if set(s1) != set(closed):
        raise ProvenanceMismatch("s1 must cover exactly the closed qubits")
    return {q: int(b) for q, b in s1.items()}


def compute_head_vector(
    tn: TensorNetwork,
    tree: ContractionTree,
    sliced_indices,
    s1,
    slice_range: tuple[int, int] | None = None,
    precision: str = "double",
    mode: str = "fixed",
    stats: EngineStats | None = None,
) -> HeadVector:
    """Sum head contractions over a range of slice assignments.

    The result is a vector over the cut indices (ascending id order).
    Ranged calls return partial sums; in fixed mode, partials over
    aligned power-of-two ranges later reduce to exactly the full-range
    result.
    """
    s1 = normalize_s1(tn, s1)
    tn = tn.repin(s1)
    sliced_indices = list(sliced_indices)
    head_leaves, head_steps, _, _, cut = _split(tn, tree)
    head_set = set(head_leaves)
    for ix in sliced_indices:
        eps = tn.index_endpoints.get(ix, ())
        if len(eps) != 2 or any(e not in head_set for e in eps):
            raise ShapeMismatch(f"sliced index {ix} is not internal to the head")
    n_e = len(sliced_indices)
    total = 1 << n_e
    a, b = slice_range if slice_range is not None else (0, total)
    if not (0 <= a < b <= total):
        raise RangeOutOfBounds(f"range [{a},{b}) outside [0,{total})")
    dtype = DTYPES[precision]

    def head_result(mask: int) -> np.ndarray:
        assignment = {
            ix: (mask >> (n_e - 1 - pos)) & 1
            for pos, ix in enumerate(sliced_indices)
        }
        if stats is not None:
            stats.head_contractions += 1
        if not head_leaves:
            return np.ones(1, dtype=dtype)
        tensor, ids = _contract_steps(
            tn, head_leaves, head_steps, assignment, dtype, stats
        )
        if sorted(ids) != sorted(cut):
            raise ShapeMismatch("head result indices differ from the cut")
        order = [ids.index(ix) for ix in sorted(cut)]
        return np.transpose(tensor, order).reshape(-1)

    chunks = (head_result(mask) for mask in range(a, b))
    if mode == "fixed":
        data = _fixed_tree_sum(chunks)
    elif mode == "free":
        data = None
        for x in chunks:
            data = x if data is None else data + x
    else:
        raise ValueError(f"unknown reduction mode {mode!r}")
    return HeadVector(
        s1=s1,
        data=data,
        provenance=provenance_hash(tn, tree, s1, precision, mode, sliced_indices),
        cut_order=sorted(cut),
        n_e=n_e,
        slice_range=(a, b),
        mode=mode,
        sliced_indices=tuple(sliced_indices),
    )


def compute_tail_amplitudes(
    tn: TensorNetwork,
    tree: ContractionTree,
    head: HeadVector,
    space_cap: int | None = None,
    precision: str = "double",
    stats: EngineStats | None = None,
) -> AmplitudeTable:
    """All 2**n_open amplitudes as inner products with the head vector.

    The tail is contracted with its open indices kept; when the full
    open block would exceed ``space_cap`` (log2), the leading open
    qubits are pinned and the tail is re-contracted per block.
    """
    s1 = head.s1
    tn = tn.repin(s1)
    expect = provenance_hash(tn, tree, s1, precision, head.mode, head.sliced_indices)
    if expect != head.provenance:
        raise ProvenanceMismatch("head vector was produced from different inputs")
    if head.slice_range != (0, 1 << head.n_e):
        raise ProvenanceMismatch("head vector is a partial; reduce it first")
    _, _, tail_leaves, tail_steps, cut = _split(tn, tree)
    if sorted(cut) != head.cut_order:
        raise ProvenanceMismatch("cut indices differ from the head vector's")
    dtype = DTYPES[precision]
    open_qubits = sorted(tn.open_output_indices)
    n2 = len(open_qubits)
    n_c = head.n_c
    amplitudes = np.zeros(1 << n2, dtype=dtype)

    if not tail_leaves:
        # no open outputs: the amplitude is the head sum itself
        amplitudes[0] = head.data.reshape(()) if head.data.size == 1 else head.data[0]
        return _make_table(tn, tree, head, amplitudes, open_qubits, precision)

    # pin the k most significant open qubits per block to fit the cap
    k = 0
    if space_cap is not None:
        while n2 - k + n_c > space_cap and k < n2:
            k += 1
    pinned_qubits = open_qubits[:k]
    free_qubits = open_qubits[k:]
    free_ixs = [tn.open_output_indices[q] for q in free_qubits]
    head_data = head.data.astype(dtype, copy=False)

    for block in range(1 << k):
        assignment = {
            tn.open_output_indices[q]: (block >> (k - 1 - i)) & 1
            for i, q in enumerate(pinned_qubits)
        }
        if stats is not None:
            stats.tail_contractions += 1
        tensor, ids = _contract_steps(
            tn, tail_leaves, tail_steps, assignment, dtype, stats
        )
        want = free_ixs + sorted(cut)
        if sorted(ids) != sorted(want):
            raise ShapeMismatch("tail result indices differ from open+cut set")
        order = [ids.index(ix) for ix in want]
        tensor = np.transpose(tensor, order).reshape(1 << len(free_qubits), 1 << n_c)
        block_amps = tensor @ head_data
        if stats is not None:
            stats.multiplications += 1 << (len(free_qubits) + n_c)
        lo = block << len(free_qubits)
        amplitudes[lo: lo + block_amps.size] = block_amps
    return _make_table(tn, tree, head, amplitudes, open_qubits, precision)


def _make_table(tn, tree, head, amplitudes, open_qubits, precision):
    circuit_sha = tn.circuit.sha256() if tn.circuit is not None else "none"
    order_doc = tree_to_doc(tree, circuit_sha256=circuit_sha,
                            slices=list(head.sliced_indices))
    return AmplitudeTable(
        s1=head.s1,
        open_qubits=open_qubits,
        amplitudes=amplitudes,
        layout_ids=sorted(tn.circuit.layout.ids) if tn.circuit else
        sorted(set(tn.open_output_indices) | set(tn.fixed_output_bits)),
        circuit_sha256=circuit_sha,
        order_sha256=hashlib.sha256(dumps_order(order_doc).encode()).hexdigest(),
        precision=precision,
        mode=head.mode,
    )


def reduce_partials(partials: list[HeadVector]) -> HeadVector:
    """Combine disjoint-range partial head vectors into the full sum.

    Partials are ordered by range start; aligned power-of-two ranges
    are recombined along the same balanced summation tree the
    full-range fixed-mode computation uses, so the result is
    bit-identical to a single-shot run regardless of input order.
    """
    if not partials:
        raise RangeGap("no partials given")
    prov = partials[0].provenance
    n_e = partials[0].n_e
    for p in partials[1:]:
        if p.provenance != prov:
            raise ProvenanceMismatch("partials come from different runs")
        if p.n_e != n_e:
            raise ProvenanceMismatch("partials disagree on slice count")
    ordered = sorted(partials, key=lambda p: p.slice_range[0])
    pos = 0
    for p in ordered:
        a, b = p.slice_range
        if a < pos:
            raise RangeOverlap(f"range [{a},{b}) overlaps at {pos}")
        if a > pos:
            raise RangeGap(f"missing slice range [{pos},{a})")
        pos = b
    total = 1 << n_e
    if pos != total:
        raise RangeGap(f"missing slice range [{pos},{total})")

    def combine(lo: int, hi: int, items: list[HeadVector]) -> np.ndarray:
        if len(items) == 1 and items[0].slice_range == (lo, hi):
            return items[0].data
        mid = (lo + hi) // 2
        left = [p for p in items if p.slice_range[1] <= mid]
        right = [p for p in items if p.slice_range[0] >= mid]
        if len(left) + len(right) == len(items) and left and right:
            return combine(lo, mid, left) + combine(mid, hi, right)
        # unaligned ranges: deterministic sequential fallback
        acc = items[0].data
        for p in items[1:]:
            acc = acc + p.data
        return acc

    data = combine(0, total, ordered)
    return HeadVector(
        s1=ordered[0].s1,
        data=data,
        provenance=prov,
        cut_order=ordered[0].cut_order,
        n_e=n_e,
        slice_range=(0, total),
        mode=ordered[0].mode,
        sliced_indices=ordered[0].sliced_indices,
    )


def flop_estimate(complexity) -> float:
    """FLOP count for complex tensor work: 8 per counted multiplication
    (6 for the complex multiply, 2 for the additive accumulation)."""
    return 8.0 * float(complexity.tc)


# ---------------------------------------------------------------------------
# On-disk formats

TSV_SCHEMA = "tncut-amplitudes/1"


def write_amplitude_tsv(path, table: AmplitudeTable) -> None:
    with open(path, "w", newline="\n") as fh:
        s1_str = "".join(str(table.s1[q]) for q in sorted(table.s1)) or "-"
        opens = ",".join(str(q) for q in table.open_qubits) or "-"
        fh.write(
            f"# {TSV_SCHEMA} circuit_sha256={table.circuit_sha256} "
            f"order_sha256={table.order_sha256} s1={s1_str} "
            f"open_qubits={opens} n={len(table.layout_ids)} "
            f"precision={table.precision} reduction={table.mode}\n"
        )
        fh.write("bitstring\tamp_re\tamp_im\tprobability\n")
        for bits, amp, prob in table.rows():
            fh.write(f"{bits}\t{amp.real:.17g}\t{amp.imag:.17g}\t{prob:.17g}\n")


def table_from_tsv(path) -> AmplitudeTable:
    """Rebuild an AmplitudeTable from a TSV, reordering rows by s2."""
    meta, bitstrings, amps, _ = read_amplitude_tsv(path)
    n = int(meta.get("n", len(bitstrings[0]) if bitstrings else 0))
    opens = (
        [int(q) for q in meta["open_qubits"].split(",")]
        if meta.get("open_qubits", "-") != "-"
        else []
    )
    s1_str = meta.get("s1", "-")
    layout = list(range(n))
    closed = [q for q in layout if q not in set(opens)]
    s1 = {} if s1_str == "-" else {q: int(b) for q, b in zip(closed, s1_str)}
    n2 = len(opens)
    ordered = np.zeros(1 << n2, dtype=complex)
    pos = {q: i for i, q in enumerate(sorted(layout))}
    for bits, amp in zip(bitstrings, amps):
        mask = 0
        for q in opens:
            mask = (mask << 1) | int(bits[pos[q]])
        ordered[mask] = amp
    return AmplitudeTable(
        s1=s1,
        open_qubits=sorted(opens),
        amplitudes=ordered,
        layout_ids=layout,
        circuit_sha256=meta.get("circuit_sha256", ""),
        order_sha256=meta.get("order_sha256", ""),
        precision=meta.get("precision", "double"),
        mode=meta.get("reduction", ""),
    )


def read_amplitude_tsv(path):
    """Returns (meta dict, list of bitstrings, complex amps, probs)."""
    meta = {}
    bitstrings = []
    amps = []
    probs = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                for token in line[1:].split():
                    if "=" in token:
                        k, v = token.split("=", 1)
                        meta[k] = v
                continue
            if line.startswith("bitstring") or not line:
                continue
            bits, re_s, im_s, p_s = line.split("\t")
            bitstrings.append(bits)
            amps.append(complex(float(re_s), float(im_s)))
            probs.append(float(p_s))
    return meta, bitstrings, np.array(amps), np.array(probs)


_HV_MAGIC = b"TNCUTHV1"


def write_head_vector(path, head: HeadVector) -> None:
    dtype_code = 0 if head.data.dtype == np.complex128 else 1
    with open(path, "wb") as fh:
        fh.write(_HV_MAGIC)
        fh.write(struct.pack("<IB3x", 1, dtype_code))
        fh.write(head.provenance.encode("ascii"))
        fh.write(struct.pack("<II", head.n_c, head.n_e))
        fh.write(struct.pack("<QQ", *head.slice_range))
        mode_b = head.mode.encode("ascii")[:8].ljust(8, b"\0")
        fh.write(mode_b)
        cut = np.asarray(head.cut_order, dtype="<u8")
        fh.write(cut.tobytes())
        sl = np.asarray(head.sliced_indices, dtype="<u8")
        fh.write(sl.tobytes())
        s1_items = sorted(head.s1.items())
        fh.write(struct.pack("<I", len(s1_items)))
        for q, bit in s1_items:
            fh.write(struct.pack("<QB", q, bit))
        fh.write(np.ascontiguousarray(head.data).tobytes())


def read_head_vector(path) -> HeadVector:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _HV_MAGIC:
            raise ProvenanceMismatch(f"not a head-vector file (magic {magic!r})")
        version, dtype_code = struct.unpack("<IB3x", fh.read(8))
        if version != 1:
            raise ProvenanceMismatch(f"unsupported head-vector version {version}")
        provenance = fh.read(64).decode("ascii")
        n_c, n_e = struct.unpack("<II", fh.read(8))
        a, b = struct.unpack("<QQ", fh.read(16))
        mode = fh.read(8).rstrip(b"\0").decode("ascii")
        cut = np.frombuffer(fh.read(8 * n_c), dtype="<u8").astype(int).tolist()
        sl = np.frombuffer(fh.read(8 * n_e), dtype="<u8").astype(int).tolist()
        (n_s1,) = struct.unpack("<I", fh.read(4))
        s1 = {}
        for _ in range(n_s1):
            q, bit = struct.unpack("<QB", fh.read(9))
            s1[q] = bit
        dtype = np.complex128 if dtype_code == 0 else np.complex64
        data = np.frombuffer(fh.read(), dtype=dtype).copy()
        if data.size != 1 << n_c:
            raise ShapeMismatch(
                f"payload holds {data.size} entries, expected {1 << n_c}"
            )
    return HeadVector(
        s1=s1,
        data=data,
        provenance=provenance,
        cut_order=cut,
        n_e=n_e,
        slice_range=(a, b),
        mode=mode,
        sliced_indices=tuple(sl),
    )
