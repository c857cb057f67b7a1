"""CLI entry point for the Rado-number and density-increment toolkit."""
import json
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Any

import numpy as np
import typer
from loguru import logger

from src.applemmas.constants import ConstantBook
from src.applemmas.generators import GENERATORS, run_suite
from src.bohr.bohr_sets import build_bohr, find_regular_pair
from src.bohr.game import game_density
from src.config import DEFAULT_SEED, LOG_FILE
from src.equation.rado_criterion import CoefficientVector, is_invariant, is_partition_regular, reduce_to_triple
from src.errors import InputError, RadoError
from src.harmonics.fourier import count_triples, enumerate_triples
from src.harmonics.groups import FiniteGroup, GroupSubset
from src.increment.records import TraceRecord
from src.increment.toy import ToyConfig, flag_colouring, random_colouring, toy_iterate
from src.increment.zp import ZpConfig, random_interval_colouring, zp_iterate
from src.search.colouring_search import (
    count_solutions_interval,
    find_mono_solution,
    rado_number,
    witness_colouring,
)
from src.tools.manifest import RunManifest
from src.tools.persistence import load_colouring, load_subset, output_path, to_csv, to_ndjson
from src.utils.logging_config import configure_logging

app = typer.Typer(
    name="rado",
    help="Exact Rado numbers, Fourier counting, Bohr-set tooling and density-increment checks",
    no_args_is_help=True,
)
regular_app = typer.Typer(help="Partition regularity of a single equation", no_args_is_help=True)
rado_app = typer.Typer(help="Rado numbers by exhaustive colouring search", no_args_is_help=True)
count_app = typer.Typer(help="Monochromatic solution counts of a(x - y) = bz", no_args_is_help=True)
bohr_app = typer.Typer(help="Bohr sets in Z/pZ", no_args_is_help=True)
trace_app = typer.Typer(help="Density-increment tracers", no_args_is_help=True)
book_app = typer.Typer(help="Show or write a ConstantBook", no_args_is_help=True)
app.add_typer(regular_app, name="regular")
app.add_typer(rado_app, name="rado")
app.add_typer(count_app, name="count")
app.add_typer(bohr_app, name="bohr")
app.add_typer(trace_app, name="trace")
app.add_typer(book_app, name="book")

# Options shared by every command
CsvOpt = Annotated[bool, typer.Option("--csv", help="Emit CSV rows instead of JSON")]
JsonOpt = Annotated[bool, typer.Option("--json", help="Emit JSON (the default)")]
BookOpt = Annotated[str | None, typer.Option("--book", help="ConstantBook JSON file, or 'desk'")]
SeedOpt = Annotated[int, typer.Option("--seed", help="Random seed (RADO_SEED)")]
OutOpt = Annotated[Path | None, typer.Option("--out", help="Also write the output to this file")]
TimingOpt = Annotated[bool, typer.Option("--timing", help="Record wall time in the manifest")]
VerboseOpt = Annotated[bool, typer.Option("--verbose", "-v", help="Show progress logs on stderr")]


def _setup(verbose: bool) -> float:
    # stdout carries only the payload
    configure_logging(level="INFO" if verbose else "ERROR", log_file=LOG_FILE)
    return time.perf_counter()


def _book(source: str | None) -> ConstantBook:
    if source == "desk":
        return ConstantBook.desk()
    return ConstantBook.load(source)


@contextmanager
def _guarded():
    """Map toolkit errors to their exit codes."""
    try:
        yield
    except RadoError as e:
        logger.error(f"{type(e).__name__}: {e}")
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(e.exit_code)


def _emit(
    subcommand: str,
    result: Any,
    rows: list[dict[str, Any]],
    *,
    csv_out: bool,
    config: dict[str, Any],
    book: ConstantBook,
    seed: int | None,
    started: float,
    timing: bool,
    out: Path | None,
) -> None:
    """Print the result with its manifest; --csv prints the flat rows under a manifest comment."""
    wall = time.perf_counter() - started
    logger.info(f"{subcommand} finished in {wall:.3f}s")
    manifest = RunManifest.build(subcommand, config, book, seed=seed, wall_time=wall if timing else None)
    if csv_out:
        text = f"# manifest sha256={manifest.digest()}\n" + to_csv(rows)
    else:
        text = json.dumps({"manifest": manifest.model_dump(), "result": result}, indent=2, sort_keys=True, default=str)
    typer.echo(text.rstrip("\n"))
    if out is not None:
        path = output_path(str(out))
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text if text.endswith("\n") else text + "\n")


# === regular ===

@regular_app.command("check")
def regular_check(
    equation: Annotated[str, typer.Argument(help="Coefficients, e.g. 1,1,-1")],
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    out: OutOpt = None,
    timing: TimingOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Decide partition regularity by the zero-sum criterion and print the witness."""
    started = _setup(verbose)
    with _guarded():
        a = CoefficientVector.parse(equation)
        witness = is_partition_regular(a)
        result = {
            "equation": list(a.entries),
            "partition_regular": witness is not None,
            "witness": witness.model_dump() if witness else None,
        }
        row = {"equation": str(a), "partition_regular": witness is not None,
               **(witness.model_dump() if witness else {})}
        _emit("regular check", result, [row], csv_out=csv_out, config={"equation": equation},
              book=ConstantBook(), seed=None, started=started, timing=timing, out=out)
    if witness is None:
        raise typer.Exit(1)


@regular_app.command("reduce")
def regular_reduce(
    equation: Annotated[str, typer.Argument(help="Coefficients, e.g. 2,3,-5")],
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    out: OutOpt = None,
    timing: TimingOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Reduce to the triple form a_j(x - y) = b z."""
    started = _setup(verbose)
    with _guarded():
        a = CoefficientVector.parse(equation)
        a_j, b, witness = reduce_to_triple(a)
        result = {"a": a_j, "b": b, "invariant": is_invariant(a), "witness": witness.model_dump()}
        _emit("regular reduce", result, [{"equation": str(a), "a": a_j, "b": b, "invariant": is_invariant(a)}],
              csv_out=csv_out, config={"equation": equation}, book=ConstantBook(), seed=None,
              started=started, timing=timing, out=out)


# === rado ===

@rado_app.command("number")
def rado_number_cmd(
    eq: Annotated[str, typer.Option("--eq", help="Coefficients, e.g. 1,1,-1")],
    colours: Annotated[int, typer.Option("--colours", "-r", help="Number of colours")] = 2,
    n_max: Annotated[int, typer.Option("--max", help="Search budget N_max")] = 50,
    distinct: Annotated[bool, typer.Option("--distinct", help="Require distinct coordinates")] = False,
    threads: Annotated[int, typer.Option("--threads", help="Worker threads for the search")] = 1,
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    out: OutOpt = None,
    timing: TimingOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Compute the Rado number; exit 3 when the search budget is too small."""
    started = _setup(verbose)
    with _guarded():
        a = CoefficientVector.parse(eq)
        result = rado_number(a, colours, n_max, distinct=distinct, threads=threads)
        row = {"equation": str(a), "r": colours, "n_max": n_max, "value": result.value,
               "nodes": result.nodes_explored, "distinct": distinct}
        _emit("rado number", result.model_dump(), [row], csv_out=csv_out,
              config={"eq": eq, "colours": colours, "max": n_max, "distinct": distinct},
              book=ConstantBook(), seed=None, started=started, timing=timing, out=out)
    if result.inconclusive:
        raise typer.Exit(3)


@rado_app.command("witness")
def rado_witness(
    eq: Annotated[str, typer.Option("--eq", help="Coefficients, e.g. 1,1,-1")],
    colours: Annotated[int, typer.Option("--colours", "-r")] = 2,
    n: Annotated[int, typer.Option("--n", help="Colour [n]")] = 4,
    distinct: Annotated[bool, typer.Option("--distinct")] = False,
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    out: OutOpt = None,
    timing: TimingOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Find an r-colouring of [n] with no monochromatic solution; exit 1 if none exists."""
    started = _setup(verbose)
    with _guarded():
        a = CoefficientVector.parse(eq)
        colouring = witness_colouring(a, colours, n, distinct=distinct)
        rows = [{"colour": c, "members": " ".join(map(str, members))}
                for c, members in enumerate(colouring.classes)] if colouring else []
        _emit("rado witness", colouring.model_dump() if colouring else None, rows, csv_out=csv_out,
              config={"eq": eq, "colours": colours, "n": n, "distinct": distinct},
              book=ConstantBook(), seed=None, started=started, timing=timing, out=out)
    if colouring is None:
        raise typer.Exit(1)


@rado_app.command("verify")
def rado_verify(
    eq: Annotated[str, typer.Option("--eq", help="Coefficients, e.g. 1,1,-1")],
    colouring_file: Annotated[Path, typer.Option("--colouring", help="Colouring JSON")],
    distinct: Annotated[bool, typer.Option("--distinct")] = False,
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    out: OutOpt = None,
    timing: TimingOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Check that a colouring avoids monochromatic solutions; exit 1 and print one if it does not."""
    started = _setup(verbose)
    with _guarded():
        a = CoefficientVector.parse(eq)
        colouring = load_colouring(colouring_file)
        found = find_mono_solution(colouring, a, distinct=distinct)
        result = {"avoiding": found is None, "colour": found[0] if found else None,
                  "solution": list(found[1]) if found else None}
        _emit("rado verify", result, [{**result, "solution": " ".join(map(str, result["solution"] or []))}],
              csv_out=csv_out, config={"eq": eq, "colouring": str(colouring_file), "distinct": distinct},
              book=ConstantBook(), seed=None, started=started, timing=timing, out=out)
    if found is not None:
        raise typer.Exit(1)


# === count ===

@count_app.command("mono")
def count_mono(
    set_file: Annotated[Path | None, typer.Option("--set", help="Group subset JSON")] = None,
    group_label: Annotated[str | None, typer.Option("--group", help="zp:<p> or fq:<q>^<n> for a random set")] = None,
    density: Annotated[float, typer.Option("--density", help="Density of the random set")] = 0.3,
    a: Annotated[int, typer.Option("--a")] = 1,
    b: Annotated[int, typer.Option("--b")] = 1,
    seed: SeedOpt = DEFAULT_SEED,
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    out: OutOpt = None,
    timing: TimingOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Count (x, y, z) in A^3 with ax - ay = bz by FFT and check it against enumeration."""
    started = _setup(verbose)
    with _guarded():
        if set_file is not None:
            A = load_subset(set_file)
        elif group_label is not None:
            group = FiniteGroup.parse(group_label)
            A = GroupSubset(group=group, mask=np.random.default_rng(seed).random(group.order) < density)
        else:
            raise InputError("give --set or --group")
        count = count_triples(A, a, b)
        oracle = enumerate_triples(A, a, b)
        result = {"group": A.group.label, "size": A.size, "a": a, "b": b, "count": count, "oracle": oracle}
        _emit("count mono", result, [result], csv_out=csv_out,
              config={"set": str(set_file) if set_file else None, "group": group_label, "density": density,
                      "a": a, "b": b},
              book=ConstantBook(), seed=seed, started=started, timing=timing, out=out)
    if count != oracle:
        raise typer.Exit(1)


@count_app.command("interval")
def count_interval(
    colouring_file: Annotated[Path, typer.Option("--colouring", help="Colouring JSON")],
    a: Annotated[int, typer.Option("--a")] = 1,
    b: Annotated[int, typer.Option("--b")] = 1,
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    out: OutOpt = None,
    timing: TimingOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Per-class counts of integer solutions of ax - ay = bz."""
    started = _setup(verbose)
    with _guarded():
        colouring = load_colouring(colouring_file)
        rows = [{"colour": c, "size": len(members), "count": count_solutions_interval(members, a, b)}
                for c, members in enumerate(colouring.classes)]
        _emit("count interval", rows, rows, csv_out=csv_out,
              config={"colouring": str(colouring_file), "a": a, "b": b},
              book=ConstantBook(), seed=None, started=started, timing=timing, out=out)


# === bohr ===

def _frequencies(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise InputError(f"frequencies must be integers: {text!r}") from e


@bohr_app.command("build")
def bohr_build(
    p: Annotated[int, typer.Option("--p", help="Prime modulus")],
    freq: Annotated[str, typer.Option("--freq", help="Frequencies, e.g. 1,5")],
    width: Annotated[float, typer.Option("--width", help="Width in (0, 2]")],
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    out: OutOpt = None,
    timing: TimingOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Build B(Gamma, delta) by enumeration."""
    started = _setup(verbose)
    with _guarded():
        bohr = build_bohr(FiniteGroup.cyclic(p), _frequencies(freq), width)
        row = {"p": p, "frequencies": freq, "width": width, "size": bohr.size}
        _emit("bohr build", bohr.to_json(), [row], csv_out=csv_out,
              config={"p": p, "freq": freq, "width": width},
              book=ConstantBook(), seed=None, started=started, timing=timing, out=out)


@bohr_app.command("regularize")
def bohr_regularize(
    p: Annotated[int, typer.Option("--p")],
    freq: Annotated[str, typer.Option("--freq")],
    width: Annotated[float, typer.Option("--width")],
    l: Annotated[int, typer.Option("--l", help="Copies of the companion set")] = 1,
    eta: Annotated[float, typer.Option("--eta", help="Allowed growth")] = 0.5,
    grid: Annotated[int, typer.Option("--grid", help="Candidate widths")] = 64,
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    out: OutOpt = None,
    timing: TimingOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Find a regular pair of widths; exit 3 when the grid runs out."""
    started = _setup(verbose)
    with _guarded():
        pair = find_regular_pair(FiniteGroup.cyclic(p), _frequencies(freq), width, l, eta, grid)
        row = {k: v for k, v in pair.to_json().items() if k != "frequencies"}
        _emit("bohr regularize", pair.to_json(), [row], csv_out=csv_out,
              config={"p": p, "freq": freq, "width": width, "l": l, "eta": eta, "grid": grid},
              book=ConstantBook(), seed=None, started=started, timing=timing, out=out)


@bohr_app.command("game")
def bohr_game(
    set_file: Annotated[Path, typer.Option("--set", help="Subset A as JSON")],
    support_file: Annotated[Path | None, typer.Option("--support", help="Support set as JSON")] = None,
    freq: Annotated[str | None, typer.Option("--freq", help="Support as a Bohr set: frequencies")] = None,
    width: Annotated[float | None, typer.Option("--width", help="Support as a Bohr set: width")] = None,
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    out: OutOpt = None,
    timing: TimingOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """min over nu on the support of ||1_A * nu||_inf, exact for small supports."""
    started = _setup(verbose)
    with _guarded():
        A = load_subset(set_file)
        if support_file is not None:
            support = load_subset(support_file)
        elif freq is not None and width is not None:
            support = build_bohr(A.group, _frequencies(freq), width).members
        else:
            raise InputError("give --support or both --freq and --width")
        value = game_density(A, support)
        row = {"value": value.value, "exact": value.exact, "gap": value.gap, "method": value.method}
        _emit("bohr game", value.model_dump(), [row], csv_out=csv_out,
              config={"set": str(set_file), "support": str(support_file) if support_file else None,
                      "freq": freq, "width": width},
              book=ConstantBook(), seed=None, started=started, timing=timing, out=out)


# === lemma ===

@app.command()
def lemma(
    name: Annotated[str, typer.Argument(help=f"One of: {', '.join(GENERATORS)}")],
    p: Annotated[int, typer.Option("--p", help="Prime modulus of the instances")] = 101,
    instances: Annotated[int, typer.Option("--instances", help="Verdicts to produce")] = 10,
    seed: SeedOpt = DEFAULT_SEED,
    book_file: BookOpt = None,
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    out: OutOpt = None,
    timing: TimingOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Run a generated verification suite; exit 1 on a failed verdict or mismatch, 3 if draws run out."""
    started = _setup(verbose)
    with _guarded():
        book = _book(book_file)
        report = run_suite(name, p, instances, seed=seed, book=book)
        result = {"summary": report.summary(), "verdicts": [v.model_dump() for v in report.verdicts],
                  "mismatches": report.mismatches}
        _emit(f"lemma {name}", result, [v.summary_row() for v in report.verdicts], csv_out=csv_out,
              config={"p": p, "instances": instances}, book=book, seed=seed, started=started,
              timing=timing, out=out)
    if report.passed < report.produced or report.mismatches:
        raise typer.Exit(1)
    if report.produced < instances:
        raise typer.Exit(3)


# === trace ===

def _trace_exit(records: list[TraceRecord]) -> int:
    code = 0
    for record in records:
        if record.outcome.status == "flagged":
            budget = record.outcome.state_dump.get("error") == "BudgetExceeded"
            code = max(code, 3 if budget else 1)
    return code


def _emit_traces(subcommand: str, records: list[TraceRecord], *, csv_out: bool, config: dict, book: ConstantBook,
                 seed: int, started: float, timing: bool, out: Path | None) -> None:
    """Newline-delimited JSON, one trace per line with the run manifest; --csv gives the step summary."""
    wall = time.perf_counter() - started
    manifest = RunManifest.build(subcommand, config, book, seed=seed, wall_time=wall if timing else None)
    if csv_out:
        rows = [{"run": i, **row} for i, record in enumerate(records) for row in record.summary_rows()]
        text = f"# manifest sha256={manifest.digest()}\n" + to_csv(rows)
    else:
        text = to_ndjson({"manifest": manifest.model_dump(), **record.model_dump()} for record in records) + "\n"
    typer.echo(text.rstrip("\n"))
    if out is not None:
        path = output_path(str(out))
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


@trace_app.command("toy")
def trace_toy(
    q: Annotated[int | None, typer.Option("--q", help="Field size")] = None,
    n: Annotated[int | None, typer.Option("--n", help="Dimension")] = None,
    colours: Annotated[int | None, typer.Option("--colours", help="Colours of the random colouring")] = None,
    a: Annotated[int | None, typer.Option("--a")] = None,
    b: Annotated[int | None, typer.Option("--b")] = None,
    flag_depth: Annotated[int | None, typer.Option("--flag-depth", help="Use the nested-flag colouring")] = None,
    runs: Annotated[int, typer.Option("--runs", help="Independent seeds seed, seed + 1, ...")] = 1,
    threads: Annotated[int, typer.Option("--threads", help="Traces run in parallel")] = 1,
    seed: Annotated[int | None, typer.Option("--seed")] = None,
    config_file: Annotated[Path | None, typer.Option("--config", help="ToyConfig JSON")] = None,
    book_file: BookOpt = None,
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    out: OutOpt = None,
    timing: TimingOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Run the subspace iteration on colourings of F_q^n."""
    started = _setup(verbose)
    with _guarded():
        config = ToyConfig.load(config_file, q=q, n=n, colours=colours, a=a, b=b, seed=seed)
        if book_file is not None:
            config = config.model_copy(update={"book": _book(book_file)})
        group = FiniteGroup.vector(config.q, config.n)

        def run(offset: int) -> TraceRecord:
            if flag_depth is not None:
                classes = flag_colouring(group, flag_depth)
            else:
                classes = random_colouring(group, config.colours, config.seed + offset)
            return toy_iterate(classes, config.a, config.b, config.model_copy(update={"seed": config.seed + offset}))

        with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
            records = list(pool.map(run, range(runs)))
        _emit_traces("trace toy", records, csv_out=csv_out,
                     config={**config.model_dump(exclude={"book"}), "flag_depth": flag_depth, "runs": runs},
                     book=config.book, seed=config.seed, started=started, timing=timing, out=out)
    raise typer.Exit(_trace_exit(records))


@trace_app.command("zp")
def trace_zp(
    n: Annotated[int | None, typer.Option("--N", help="Colour {-N..N} (or [N] from a file)")] = None,
    a: Annotated[int | None, typer.Option("--a")] = None,
    b: Annotated[int | None, typer.Option("--b")] = None,
    colouring_file: Annotated[Path | None, typer.Option("--colouring", help="Colouring JSON")] = None,
    colours: Annotated[int, typer.Option("--colours", help="Colours of a random colouring")] = 2,
    grid: Annotated[int | None, typer.Option("--grid", help="Regular-pair grid")] = None,
    runs: Annotated[int, typer.Option("--runs")] = 1,
    threads: Annotated[int, typer.Option("--threads")] = 1,
    seed: Annotated[int | None, typer.Option("--seed")] = None,
    config_file: Annotated[Path | None, typer.Option("--config", help="ZpConfig JSON")] = None,
    book_file: BookOpt = None,
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    out: OutOpt = None,
    timing: TimingOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Run the Bohr-set iteration on a colouring of {-N..N} embedded in Z/pZ."""
    started = _setup(verbose)
    with _guarded():
        config = ZpConfig.load(config_file, n=n, a=a, b=b, grid=grid, seed=seed)
        if book_file is not None:
            config = config.model_copy(update={"book": _book(book_file)})
        given = load_colouring(colouring_file) if colouring_file else None

        def run(offset: int) -> TraceRecord:
            colouring = given or random_interval_colouring(config.n, colours, config.seed + offset)
            return zp_iterate(colouring, config.a, config.b, config.model_copy(update={"seed": config.seed + offset}))

        with ThreadPoolExecutor(max_workers=max(threads, 1)) as pool:
            records = list(pool.map(run, range(runs)))
        _emit_traces("trace zp", records, csv_out=csv_out,
                     config={**config.model_dump(exclude={"book"}), "colouring": str(colouring_file)
                             if colouring_file else None, "colours": colours, "runs": runs},
                     book=config.book, seed=config.seed, started=started, timing=timing, out=out)
    raise typer.Exit(_trace_exit(records))


# === book ===

@book_app.command("show")
def book_show(
    book_file: BookOpt = None,
    csv_out: CsvOpt = False,
    json_out: JsonOpt = True,
    verbose: VerboseOpt = False,
) -> None:
    """Print a ConstantBook with its hash."""
    _setup(verbose)
    with _guarded():
        book = _book(book_file)
        payload = {**book.model_dump(), "hash": book.digest()}
        if csv_out:
            typer.echo(to_csv([payload]).rstrip("\n"))
        else:
            typer.echo(json.dumps(payload, indent=2, sort_keys=True))


@book_app.command("write")
def book_write(
    path: Annotated[Path, typer.Argument(help="Destination JSON file")],
    desk: Annotated[bool, typer.Option("--desk", help="Start from the desk-scale book")] = False,
    overrides: Annotated[list[str] | None, typer.Option("--set", help="NAME=VALUE, repeatable")] = None,
    verbose: VerboseOpt = False,
) -> None:
    """Write a ConstantBook, optionally with overridden constants."""
    _setup(verbose)
    with _guarded():
        book = ConstantBook.desk() if desk else ConstantBook()
        values: dict[str, float] = {}
        for item in overrides or []:
            name, sep, value = item.partition("=")
            if not sep:
                raise InputError(f"override must be NAME=VALUE, got {item!r}")
            try:
                values[name.strip()] = float(value)
            except ValueError as e:
                raise InputError(f"override value must be a number: {item!r}") from e
        if values:
            book = book.with_overrides(**values)
        saved = book.save(path)
        typer.echo(json.dumps({"path": str(saved), "hash": book.digest()}, sort_keys=True))


if __name__ == "__main__":
    app()
