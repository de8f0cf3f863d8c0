"""Command-line interface.

Pipeline commands exchange files: ``order`` writes a contraction-order
JSON, ``slice`` adds sliced indices and subtask figures to it, ``run``
produces an amplitude TSV (or a partial head-vector binary for a slice
sub-range), and ``reduce`` combines partials into the TSV.  ``oracle``
emits the same TSV from the brute-force simulator, and the analytics
commands consume TSVs.

Exit codes: 0 success, 2 input errors, 3 search-budget failures
(best-so-far order written with a ``.partial`` suffix), 4 internal
invariant violations.
"""

from __future__ import annotations

import dataclasses
import functools
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import __version__
from .analytics import (
    histogram,
    ks_to_porter_thomas,
    marginal_and_conditional,
    mixed_xeb,
    postselect_curve,
    xeb,
)
from .circuit import parse_circuit
from .engine import (
    TSV_SCHEMA,
    AmplitudeTable,
    EngineStats,
    compute_head_vector,
    compute_tail_amplitudes,
    flop_estimate,
    read_amplitude_tsv,
    read_head_vector,
    reduce_partials,
    table_from_tsv,
    write_amplitude_tsv,
    write_head_vector,
)
from .errors import (
    BudgetExhausted,
    InfeasibleCut,
    ProvenanceMismatch,
    ShapeMismatch,
    TncutError,
)
from .network import build_network
from .ordering import (
    ORDER_SCHEMA,
    PartitionConstraints,
    auto_open_qubits,
    branch_merge,
    complexity_of,
    cut_indices,
    doc_to_tree,
    dumps_order,
    hierarchical_partition,
    tree_to_doc,
)
from .slicing import select_slices
from .statevector import simulate

_VERSION_TEXT = (
    f"tncut {__version__} "
    f"(order schema {ORDER_SCHEMA}; amplitude schema {TSV_SCHEMA}; "
    f"head-vector format TNCUTHV1 v1)"
)


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (BudgetExhausted, InfeasibleCut) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(3)
        except ShapeMismatch as e:
            click.echo(f"internal error: {e}", err=True)
            sys.exit(4)
        except (TncutError, OSError, ValueError) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)

    return wrapper


def _load_toml(path):
    try:
        import tomllib as toml
    except ImportError:  # python 3.10
        import tomli as toml
    with open(path, "rb") as fh:
        return toml.load(fh)


@click.group()
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              help="TOML file whose [command] tables mirror the flags.")
@click.option("--version", is_flag=True, is_eager=True, expose_value=False,
              callback=lambda ctx, p, v: (click.echo(_VERSION_TEXT), ctx.exit())
              if v and not ctx.resilient_parsing else None,
              help="Print version and schema versions.")
@click.pass_context
def main(ctx, config):
    """Batch amplitude simulation via head/tail tensor contraction."""
    if config:
        ctx.default_map = _load_toml(config)


def _read_circuit(path, fmt):
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read(), fmt)


def _parse_open(value, circuit):
    if value == "auto":
        return None
    try:
        opens = sorted({int(x) for x in value.split(",") if x.strip() != ""})
    except ValueError:
        raise click.UsageError(f"bad open-qubit list {value!r}")
    bad = [q for q in opens if q not in set(circuit.layout.ids)]
    if bad:
        raise click.UsageError(f"open qubits {bad} not in the layout")
    return opens


def _network_for(circuit, opens):
    fixed = {q: 0 for q in circuit.layout.ids if q not in set(opens)}
    return build_network(circuit, set(opens), fixed)


def _load_order(path):
    with open(path) as fh:
        doc = json.load(fh)
    return doc, doc_to_tree(doc)


_fmt_option = click.option(
    "--format", "fmt", type=click.Choice(["qsim_text", "native_json"]),
    default="qsim_text", show_default=True,
)


@main.command()
@click.argument("circuit_file", type=click.Path(exists=True, dir_okay=False))
@_fmt_option
@click.option("--json", "as_json", is_flag=True, help="Emit the summary as JSON.")
@guarded
def info(circuit_file, fmt, as_json):
    """Parse a circuit and report sizes, gate counts, and fused network size."""
    c = _read_circuit(circuit_file, fmt)
    counts: dict[str, int] = {}
    for _, g in c.gates():
        counts[g.kind.value] = counts.get(g.kind.value, 0) + 1
    tn = _network_for(c, list(c.layout.ids))  # fused size is config-independent
    summary = {
        "file": circuit_file,
        "n": c.n,
        "cycles": c.cycles,
        "moments": len(c.moments),
        "gates": counts,
        "gate_total": c.gate_count(),
        "fused_tensors": len(tn.nodes),
        "circuit_sha256": c.sha256(),
    }
    if as_json:
        click.echo(json.dumps(summary, sort_keys=True))
    else:
        click.echo(f"qubits:        {summary['n']}")
        click.echo(f"cycles:        {summary['cycles']}")
        click.echo(f"moments:       {summary['moments']}")
        for kind in sorted(counts):
            click.echo(f"gates[{kind}]: {counts[kind]}")
        click.echo(f"gate total:    {summary['gate_total']}")
        click.echo(f"fused tensors: {summary['fused_tensors']}")
        click.echo(f"sha256:        {summary['circuit_sha256']}")


@main.command()
@click.argument("circuit_file", type=click.Path(exists=True, dir_okay=False))
@_fmt_option
@click.option("--open", "open_spec", default="auto", show_default=True,
              help="'auto' or a comma-separated list of open qubit ids.")
@click.option("--max-space", type=int, default=None, help="log2 space cap per tensor.")
@click.option("--max-time", type=int, default=None, help="log2 time cap per step.")
@click.option("--max-cut", type=int, default=None, help="Cap on the first-cut size.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--leaf-limit", type=int, default=60, show_default=True)
@click.option("--restarts", type=int, default=32, show_default=True)
@click.option("--branch-merge", "merge_threshold", type=float, default=None,
              help="Apply branch merging with this imbalance threshold.")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def order(circuit_file, fmt, open_spec, max_space, max_time, max_cut, seed,
          leaf_limit, restarts, merge_threshold, output):
    """Find a head/tail contraction order and write it as JSON."""
    try:
        c = _read_circuit(circuit_file, fmt)
        opens = _parse_open(open_spec, c)
        cons = PartitionConstraints(
            max_space=max_space, max_time=max_time, max_cut=max_cut,
            rng_seed=seed, leaf_limit=leaf_limit, restarts=restarts,
        )
        if opens is None:
            probe = _network_for(c, list(c.layout.ids))
            opens = auto_open_qubits(probe, cons)
            click.echo(f"auto-selected open qubits: {','.join(map(str, opens))}")
        tn = _network_for(c, opens)
        try:
            tree = hierarchical_partition(tn, cons)
        except BudgetExhausted as e:
            if e.best_tree is not None:
                doc = tree_to_doc(e.best_tree, circuit_sha256=c.sha256(),
                                  open_qubits=opens)
                with open(output + ".partial", "w") as fh:
                    fh.write(dumps_order(doc))
                click.echo(f"best-so-far order written to {output}.partial", err=True)
            raise
        if merge_threshold is not None:
            tree = branch_merge(tree, tn, merge_threshold)
        comp = complexity_of(tn, tree)
        head, tail = tree.head_tail_leaves()
        n_c = len(cut_indices(tn, set(head), set(tail))) if tree.first_cut is not None else 0
        doc = tree_to_doc(tree, circuit_sha256=c.sha256(), open_qubits=opens)
        with open(output, "w") as fh:
            fh.write(dumps_order(doc))
        click.echo(f"tc:      {comp.tc:.4g} (2^{comp.tc_log2:.2f})")
        click.echo(f"sc:      2^{comp.sc_log2}")
        click.echo(f"n_c:     {n_c}")
        click.echo(f"head/tail: {len(head)}/{len(tail)} nodes")
        click.echo(f"flops:   {flop_estimate(comp):.4g}")
    except (BudgetExhausted, InfeasibleCut) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(3)
    except (TncutError, OSError, ValueError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)


@main.command("slice")
@click.argument("circuit_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("order_file", type=click.Path(exists=True, dir_okay=False))
@_fmt_option
@click.option("--target-space", type=int, required=True,
              help="log2 cap for per-subtask space.")
@click.option("--no-reconfigure", is_flag=True,
              help="Skip tree fine-tuning after each sliced index.")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@guarded
def slice_cmd(circuit_file, order_file, fmt, target_space, no_reconfigure, output):
    """Pick sliced indices for an order so subtasks fit the space target."""
    c = _read_circuit(circuit_file, fmt)
    doc, tree = _load_order(order_file)
    _check_circuit_match(doc, c)
    tn = _network_for(c, doc["open_qubits"])
    plan, tree = select_slices(
        tn, tree, target_space, reconfigure=not no_reconfigure
    )
    n2 = len(doc["open_qubits"])
    t_head = plan.subtask_count * plan.per_subtask.tc
    subtask = {
        "count": plan.subtask_count,
        "n_e": len(plan.sliced_indices),
        "tc": plan.per_subtask.tc,
        "sc_log2": plan.per_subtask.sc_log2,
        "overhead": plan.overhead,
        "target_space": target_space,
        "t_head": t_head,
    }
    if plan.tail_per_assignment is not None:
        t_tail = (1 << n2) * plan.tail_per_assignment.tc
        subtask["tail_tc"] = plan.tail_per_assignment.tc
        subtask["tail_sc_log2"] = plan.tail_per_assignment.sc_log2
        subtask["t_tail"] = t_tail
        subtask["t_total"] = t_head + t_tail
    new_doc = tree_to_doc(
        tree,
        circuit_sha256=doc.get("circuit_sha256"),
        open_qubits=doc.get("open_qubits"),
        slices=plan.sliced_indices,
        subtask=subtask,
    )
    with open(output, "w") as fh:
        fh.write(dumps_order(new_doc))
    click.echo(f"subtasks: 2^{len(plan.sliced_indices)}")
    click.echo(f"T_sub:    {float(plan.per_subtask.tc):.4g}")
    click.echo(f"S_sub:    2^{plan.per_subtask.sc_log2}")
    click.echo(f"T_head:   {float(t_head):.4g}")
    if plan.tail_per_assignment is not None:
        click.echo(f"T_tail:   {float(subtask['t_tail']):.4g}")
        click.echo(f"T_total:  {float(subtask['t_total']):.4g}")
    click.echo(f"overhead: {plan.overhead:.4g}")


def _check_circuit_match(doc, circuit):
    want = doc.get("circuit_sha256")
    if want is not None and want != circuit.sha256():
        raise ProvenanceMismatch(
            "order file was produced from a different circuit"
        )


def _parse_range(spec, n_e):
    if spec is None:
        return None
    try:
        a, b = spec.split("..")
        return int(a), int(b)
    except ValueError:
        raise click.UsageError(f"bad slice range {spec!r}; expected A..B")


@main.command()
@click.argument("circuit_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("order_file", type=click.Path(exists=True, dir_okay=False))
@_fmt_option
@click.option("--s1", default=None,
              help="Bits for the closed qubits in ascending id order "
                   "(default: all zeros).")
@click.option("--slices", "range_spec", default=None,
              help="Slice sub-range A..B; a partial head vector is written.")
@click.option("--precision", type=click.Choice(["double", "single"]),
              default="double", show_default=True)
@click.option("--reduction", type=click.Choice(["fixed", "free"]),
              default="fixed", show_default=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--manifest", "manifest_path", type=click.Path(dir_okay=False),
              default=None, help="Also write a run manifest JSON.")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@guarded
def run(circuit_file, order_file, fmt, s1, range_spec, precision, reduction,
        threads, manifest_path, output):
    """Execute an order: amplitudes TSV, or a partial for a slice range."""
    c = _read_circuit(circuit_file, fmt)
    doc, tree = _load_order(order_file)
    _check_circuit_match(doc, c)
    tn = _network_for(c, doc["open_qubits"])
    sliced = doc.get("slices", [])
    n_e = len(sliced)
    rng = _parse_range(range_spec, n_e)
    stats = EngineStats()
    started = time.time()

    full = (0, 1 << n_e)
    if rng is not None and tuple(rng) != full:
        head = compute_head_vector(
            tn, tree, sliced, s1, slice_range=rng,
            precision=precision, mode=reduction, stats=stats,
        )
        write_head_vector(output, head)
        click.echo(f"partial head vector for slices [{rng[0]},{rng[1]}) "
                   f"written to {output}")
    else:
        if threads > 1 and n_e > 0:
            parts = 1 << min(n_e, max(0, int(math.ceil(math.log2(threads)))))
            width = (1 << n_e) // parts
            ranges = [(i * width, (i + 1) * width) for i in range(parts)]
            with ThreadPoolExecutor(max_workers=threads) as pool:
                partials = list(
                    pool.map(
                        lambda r: compute_head_vector(
                            tn, tree, sliced, s1, slice_range=r,
                            precision=precision, mode=reduction,
                        ),
                        ranges,
                    )
                )
            head = reduce_partials(partials)
        else:
            head = compute_head_vector(
                tn, tree, sliced, s1, precision=precision, mode=reduction,
                stats=stats,
            )
        cap = doc.get("subtask", {}).get("target_space")
        table = compute_tail_amplitudes(
            tn, tree, head, space_cap=cap, precision=precision, stats=stats
        )
        write_amplitude_tsv(output, table)
        click.echo(f"{table.amplitudes.size} amplitudes written to {output}")
    if manifest_path:
        manifest = {
            "circuit_sha256": c.sha256(),
            "order_sha256": _doc_sha(doc),
            "s1": s1 if s1 is not None else "0" * len(tn.fixed_output_bits),
            "open_qubits": doc["open_qubits"],
            "slice_range": list(rng) if rng is not None else [0, 1 << n_e],
            "precision": precision,
            "reduction": reduction,
            "started": started,
            "finished": time.time(),
            "version": __version__,
        }
        with open(manifest_path, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _doc_sha(doc):
    import hashlib

    return hashlib.sha256(dumps_order(doc).encode()).hexdigest()


@main.command()
@click.argument("partials", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--circuit", "circuit_file", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--order", "order_file", required=True,
              type=click.Path(exists=True, dir_okay=False))
@_fmt_option
@click.option("--precision", type=click.Choice(["double", "single"]),
              default="double", show_default=True)
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@guarded
def reduce(partials, circuit_file, order_file, fmt, precision, output):
    """Combine partial head vectors and emit the amplitude TSV."""
    c = _read_circuit(circuit_file, fmt)
    doc, tree = _load_order(order_file)
    _check_circuit_match(doc, c)
    tn = _network_for(c, doc["open_qubits"])
    heads = [read_head_vector(p) for p in partials]
    head = reduce_partials(heads)
    cap = doc.get("subtask", {}).get("target_space")
    table = compute_tail_amplitudes(tn, tree, head, space_cap=cap,
                                    precision=precision)
    write_amplitude_tsv(output, table)
    click.echo(f"{table.amplitudes.size} amplitudes written to {output}")


@main.command()
@click.argument("circuit_file", type=click.Path(exists=True, dir_okay=False))
@_fmt_option
@click.option("--s1", default=None, help="Bits for the closed qubits.")
@click.option("--open", "open_spec", required=True,
              help="Comma-separated open qubit ids ('' for none).")
@click.option("--cap", type=int, default=26, show_default=True,
              help="Refuse circuits above this qubit count.")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@guarded
def oracle(circuit_file, fmt, s1, open_spec, cap, output):
    """Brute-force state-vector amplitudes in the same TSV format."""
    c = _read_circuit(circuit_file, fmt)
    opens = _parse_open(open_spec, c) if open_spec != "auto" else None
    if opens is None:
        raise click.UsageError("oracle needs an explicit open-qubit list")
    sv = simulate(c, cap=cap)
    closed = sorted(q for q in c.layout.ids if q not in set(opens))
    if s1 is None:
        s1 = "0" * len(closed)
    if s1 == "-":
        s1 = ""
    if len(s1) != len(closed):
        raise click.UsageError(
            f"s1 has {len(s1)} bits but {len(closed)} qubits are closed"
        )
    s1_bits = {q: int(b) for q, b in zip(closed, s1)}
    pos = {q: i for i, q in enumerate(sorted(c.layout.ids))}
    n = c.n
    n2 = len(opens)
    masks = np.arange(1 << n2, dtype=np.int64)
    indices = np.zeros(1 << n2, dtype=np.int64)
    for q, b in s1_bits.items():
        indices |= b << (n - 1 - pos[q])
    for i, q in enumerate(opens):
        indices |= ((masks >> (n2 - 1 - i)) & 1) << (n - 1 - pos[q])
    table = AmplitudeTable(
        s1=s1_bits,
        open_qubits=list(opens),
        amplitudes=sv.data[indices],
        layout_ids=sorted(c.layout.ids),
        circuit_sha256=c.sha256(),
        order_sha256="oracle",
        precision="double",
        mode="oracle",
    )
    write_amplitude_tsv(output, table)
    click.echo(f"{table.amplitudes.size} oracle amplitudes written to {output}")


def _read_tsv_probs(tsv, n_flag):
    meta, _, _, probs = read_amplitude_tsv(tsv)
    n = n_flag if n_flag is not None else int(meta.get("n", 0))
    if n <= 0:
        raise click.UsageError("qubit count unknown; pass -n")
    return meta, probs, n


@main.command("xeb")
@click.argument("tsv", type=click.Path(exists=True, dir_okay=False))
@click.option("-n", "n_flag", type=int, default=None,
              help="Qubit count (default: TSV header).")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@guarded
def xeb_cmd(tsv, n_flag, output):
    """Linear cross-entropy benchmark of a TSV's probabilities."""
    _, probs, n = _read_tsv_probs(tsv, n_flag)
    report = xeb(probs, n).doc()
    text = json.dumps(report, sort_keys=True)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    click.echo(text)


@main.command("hist")
@click.argument("tsv", type=click.Path(exists=True, dir_okay=False))
@click.option("--bins", type=int, default=50, show_default=True)
@click.option("--scale", type=click.Choice(["linear_Np", "log"]),
              default="linear_Np", show_default=True)
@click.option("-n", "n_flag", type=int, default=None)
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@guarded
def hist_cmd(tsv, bins, scale, n_flag, output):
    """Histogram of 2^n * p with the Porter-Thomas overlay, as CSV."""
    _, probs, n = _read_tsv_probs(tsv, n_flag)
    rows = histogram(probs, n, bins=bins, scale=scale)
    ks = ks_to_porter_thomas(probs, n)
    with open(output, "w") as fh:
        fh.write(f"# n={n} L={len(probs)}\n")
        fh.write("bin_lo,bin_hi,density,pt_density,ks_distance\n")
        for r in rows:
            fh.write(f"{r.bin_lo:.9g},{r.bin_hi:.9g},{r.density:.9g},"
                     f"{r.pt_density:.9g},{ks:.9g}\n")
    click.echo(f"ks_distance={ks:.6g}")


@main.command("curve")
@click.argument("tsv", type=click.Path(exists=True, dir_okay=False))
@click.option("--points", type=int, default=100, show_default=True)
@click.option("-n", "n_flag", type=int, default=None)
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@guarded
def curve_cmd(tsv, points, n_flag, output):
    """Post-selection curve: XEB of the top fraction, sorted by probability."""
    _, probs, n = _read_tsv_probs(tsv, n_flag)
    desc = np.sort(probs)[::-1]
    rows = postselect_curve(desc, n, points=points)
    with open(output, "w") as fh:
        fh.write("fraction,f_xeb\n")
        for frac, f in rows:
            fh.write(f"{frac:.9g},{f:.9g}\n")
    click.echo(f"full-set f_xeb={rows[-1][1]:.6g}")


@main.command("conditional")
@click.argument("tsv", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@guarded
def conditional_cmd(tsv, output):
    """Marginal P(s1), conditional distribution stats, conditional XEB."""
    table = table_from_tsv(tsv)
    marginal, conditional, f = marginal_and_conditional(table)
    doc = {
        "marginal": marginal,
        "n_open": len(table.open_qubits),
        "conditional_xeb": f,
        "conditional_min": float(conditional.min()),
        "conditional_max": float(conditional.max()),
    }
    text = json.dumps(doc, sort_keys=True)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    click.echo(text)


@main.command("mix")
@click.argument("tsv", type=click.Path(exists=True, dir_okay=False))
@click.option("--top", type=int, required=True,
              help="Number of top-probability bitstrings to keep.")
@click.option("--random", "num_random", type=int, required=True,
              help="Number of uniform-random bitstrings mixed in.")
@click.option("-n", "n_flag", type=int, default=None)
@guarded
def mix_cmd(tsv, top, num_random, n_flag):
    """Expected XEB when mixing top bitstrings with random ones."""
    _, probs, n = _read_tsv_probs(tsv, n_flag)
    desc = np.sort(probs)[::-1][:top]
    click.echo(json.dumps({
        "top": int(top),
        "num_random": int(num_random),
        "expected_f_xeb": mixed_xeb(desc, n, num_random),
    }, sort_keys=True))


if __name__ == "__main__":
    main()
