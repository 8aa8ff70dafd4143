"""Report emission: indicator tables, Pareto scatter SVGs, Gantt SVGs.

All SVG output is hand-assembled markup with fixed formatting, so report
files are byte-reproducible from the records.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from ..encoding import Genotype
from ..model import Instance, Schedule, decode

INDICATORS = ("spread", "gd", "igd")


def load_records(records_dir: str | Path) -> list[dict]:
    """Read ``records.jsonl`` from a campaign directory."""
    path = Path(records_dir) / "records.jsonl"
    records = []
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    records.sort(key=lambda r: (r["instance"], r["algorithm"], r["seed"]))
    return records


def load_reference_fronts(records_dir: str | Path) -> dict:
    path = Path(records_dir) / "reference_fronts.json"
    return json.loads(path.read_text(encoding="utf-8"))


def mean_table(records: Sequence[dict], indicator: str) -> tuple[list[str], list[list[str]]]:
    """Per-(F, m, n) mean of one indicator, one column per algorithm.

    Returns (header, rows); the final row is the column means over the
    combination rows, labelled ``Mean``.
    """
    algorithms = sorted({record["algorithm"] for record in records})
    groups: dict[tuple[int, int, int], dict[str, list[float]]] = {}
    for record in records:
        combo = (record["f"], record["m"], record["n"])
        groups.setdefault(combo, {}).setdefault(record["algorithm"], []).append(
            record[indicator]
        )
    header = ["F", "m", "n", *algorithms]
    rows = []
    sums = {algorithm: [] for algorithm in algorithms}
    for combo in sorted(groups):
        row = [str(combo[0]), str(combo[1]), str(combo[2])]
        for algorithm in algorithms:
            values = groups[combo].get(algorithm)
            if values:
                mean = sum(values) / len(values)
                row.append(f"{mean:.6f}")
                sums[algorithm].append(mean)
            else:
                row.append("")
        rows.append(row)
    mean_row = ["Mean", "", ""]
    for algorithm in algorithms:
        values = sums[algorithm]
        mean_row.append(f"{sum(values) / len(values):.6f}" if values else "")
    rows.append(mean_row)
    return header, rows


def write_mean_tables(records: Sequence[dict], out_dir: str | Path) -> None:
    """Write ``table_<indicator>.csv`` files (headers only when no records)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for indicator in INDICATORS:
        if records:
            header, rows = mean_table(records, indicator)
            lines = [",".join(header)] + [",".join(row) for row in rows]
        else:
            lines = ["F,m,n"]
        (out / f"table_{indicator}.csv").write_text(
            "\n".join(lines) + "\n", encoding="utf-8", newline="\n"
        )


# A fixed qualitative palette; algorithms map to colors in sorted order.
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def scatter_svg(
    instance_id: str,
    archives: dict[str, list[tuple[float, float]]],
    reference: Sequence[tuple[float, float]],
    width: int = 640,
    height: int = 480,
) -> str:
    """Scatter of each algorithm's front plus the reference front."""
    margin = 60
    points = [p for archive in archives.values() for p in archive] + list(reference)
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    lo_x, hi_x = min(xs), max(xs)
    lo_y, hi_y = min(ys), max(ys)
    span_x = (hi_x - lo_x) or 1.0
    span_y = (hi_y - lo_y) or 1.0

    def sx(value: float) -> str:
        return f"{margin + (value - lo_x) / span_x * (width - 2 * margin):.2f}"

    def sy(value: float) -> str:
        return f"{height - margin - (value - lo_y) / span_y * (height - 2 * margin):.2f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">'
        f"{instance_id}</text>",
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 15}" text-anchor="middle" '
        f'font-size="12">makespan</text>',
        f'<text x="15" y="{height // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {height // 2})">total carbon</text>',
    ]
    ref_sorted = sorted(reference)
    if ref_sorted:
        path = " ".join(
            f"{'M' if i == 0 else 'L'} {sx(p[0])} {sy(p[1])}" for i, p in enumerate(ref_sorted)
        )
        parts.append(f'<path d="{path}" fill="none" stroke="#999999" stroke-dasharray="4 3"/>')
        for p in ref_sorted:
            parts.append(
                f'<rect x="{float(sx(p[0])) - 2.5:.2f}" y="{float(sy(p[1])) - 2.5:.2f}" '
                f'width="5" height="5" fill="#999999"/>'
            )
    legend_y = margin
    for index, algorithm in enumerate(sorted(archives)):
        color = _PALETTE[index % len(_PALETTE)]
        for p in sorted(archives[algorithm]):
            parts.append(f'<circle cx="{sx(p[0])}" cy="{sy(p[1])}" r="3" fill="{color}" fill-opacity="0.7"/>')
        parts.append(
            f'<circle cx="{width - margin - 110}" cy="{legend_y}" r="4" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{width - margin - 100}" y="{legend_y + 4}" font-size="12">'
            f"{algorithm}</text>"
        )
        legend_y += 18
    parts.append(
        f'<text x="{width - margin - 104}" y="{legend_y + 4}" font-size="12" '
        f'fill="#999999">reference</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


class GanttBar(NamedTuple):
    factory: int
    machine: int
    job: int
    start: int
    end: int


class GanttGap(NamedTuple):
    factory: int
    machine: int
    start: int
    end: int
    powered_off: bool


def gantt_bars(instance: Instance, schedule: Schedule, genotype: Genotype) -> list[GanttBar]:
    """Operation bars of a decoded schedule, in (factory, position) order."""
    bars = []
    for f, seq in enumerate(genotype.factories):
        for k, job in enumerate(seq):
            for j in range(instance.num_machines):
                bars.append(
                    GanttBar(
                        factory=f,
                        machine=j,
                        job=job,
                        start=schedule.start[f][k][j],
                        end=schedule.completion[f][k][j],
                    )
                )
    return bars


def gantt_gaps(
    instance: Instance, schedule: Schedule, reduction_enabled: bool
) -> list[GanttGap]:
    """Idle gaps between consecutive operations, flagged when shut down."""
    rate = instance.idle_power * instance.elec_coeff
    gaps = []
    for f, completions in enumerate(schedule.completion):
        starts = schedule.start[f]
        for k in range(1, len(completions)):
            for j in range(instance.num_machines):
                gap = starts[k][j] - completions[k - 1][j]
                if gap > 0:
                    off = (
                        reduction_enabled
                        and gap >= instance.offon_time
                        and gap * rate > instance.offon_emission
                    )
                    gaps.append(
                        GanttGap(
                            factory=f,
                            machine=j,
                            start=completions[k - 1][j],
                            end=starts[k][j],
                            powered_off=off,
                        )
                    )
    return gaps


def gantt_svg(
    instance: Instance,
    genotype: Genotype,
    reduction_enabled: bool = False,
    lane_height: int = 26,
    width: int = 900,
) -> str:
    """Gantt chart: one lane per (factory, machine), idle gaps shaded.

    Gaps replaced by a machine shutdown are outlined in red.
    """
    schedule = decode(instance, genotype)
    bars = gantt_bars(instance, schedule, genotype)
    gaps = gantt_gaps(instance, schedule, reduction_enabled)
    m = instance.num_machines
    num_lanes = instance.num_factories * m
    margin_left = 110
    margin_top = 34
    height = margin_top + num_lanes * lane_height + instance.num_factories * 10 + 30
    horizon = max((bar.end for bar in bars), default=1) or 1
    scale = (width - margin_left - 30) / horizon

    def lane_y(f: int, j: int) -> int:
        return margin_top + (f * m + j) * lane_height + f * 10

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{margin_left}" y="18" font-size="14">{instance.id} '
        f"(makespan {max(schedule.factory_makespans)})</text>",
    ]
    for f in range(instance.num_factories):
        for j in range(m):
            y = lane_y(f, j)
            parts.append(
                f'<text x="8" y="{y + lane_height - 9}" font-size="11">'
                f"factory {f} / machine {j}</text>"
            )
            parts.append(
                f'<line x1="{margin_left}" y1="{y + lane_height - 4}" '
                f'x2="{width - 20}" y2="{y + lane_height - 4}" stroke="#dddddd"/>'
            )
    for gap in gaps:
        x = margin_left + gap.start * scale
        w = (gap.end - gap.start) * scale
        y = lane_y(gap.factory, gap.machine)
        fill = "#f2f2f2"
        stroke = ' stroke="#d62728" stroke-width="1.5"' if gap.powered_off else ""
        parts.append(
            f'<rect x="{x:.2f}" y="{y + 2}" width="{w:.2f}" height="{lane_height - 8}" '
            f'fill="{fill}"{stroke}/>'
        )
    for bar in bars:
        x = margin_left + bar.start * scale
        w = (bar.end - bar.start) * scale
        y = lane_y(bar.factory, bar.machine)
        hue = (bar.job * 47) % 360
        parts.append(
            f'<rect x="{x:.2f}" y="{y + 2}" width="{w:.2f}" height="{lane_height - 8}" '
            f'fill="hsl({hue}, 60%, 65%)" stroke="#555555" stroke-width="0.5"/>'
        )
        if w > 14:
            parts.append(
                f'<text x="{x + w / 2:.2f}" y="{y + lane_height - 9}" font-size="10" '
                f'text-anchor="middle">{bar.job}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_report(
    records_dir: str | Path,
    out_dir: str | Path,
    gantt: str | None = None,
    instances_dir: str | Path | None = None,
) -> list[Path]:
    """Emit tables and plots from a campaign directory.

    ``gantt`` selects a run as ``<instance>:<seed>``; its best-makespan
    genotype is drawn.  When several algorithms match, the first in sorted
    order is used.  Drawing a Gantt chart needs the instance files, so
    ``instances_dir`` must then point at the dataset directory.
    """
    records = load_records(records_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    write_mean_tables(records, out)
    written.extend(out / f"table_{indicator}.csv" for indicator in INDICATORS)
    if records:
        reference = load_reference_fronts(records_dir)
        by_instance: dict[str, dict[str, list]] = {}
        for record in records:
            by_instance.setdefault(record["instance"], {}).setdefault(
                record["algorithm"], []
            ).extend((ms, ce) for ms, ce in record["archive"])
        for instance_id in sorted(by_instance):
            ref_points = [tuple(p) for p in reference[instance_id]["points"]]
            svg = scatter_svg(instance_id, by_instance[instance_id], ref_points)
            path = out / f"scatter_{instance_id}.svg"
            path.write_text(svg, encoding="utf-8", newline="\n")
            written.append(path)
    if gantt is not None:
        instance_id, _, seed_text = gantt.partition(":")
        if not seed_text:
            raise ValueError(f"--gantt wants <instance>:<seed>, got {gantt!r}")
        seed = int(seed_text)
        matches = [
            r for r in records if r["instance"] == instance_id and r["seed"] == seed
        ]
        if not matches:
            raise ValueError(f"no record for instance {instance_id!r} with seed {seed}")
        record = matches[0]
        if instances_dir is None:
            raise ValueError("drawing a Gantt chart requires --instances")
        from .instance_io import read_instance

        instance = read_instance(Path(instances_dir) / f"{instance_id}.dat")
        genotype = Genotype(tuple(tuple(seq) for seq in record["best_genotype"]))
        reduction = record["algorithm"] not in ("nsga2", "random", "non_carbon")
        svg = gantt_svg(instance, genotype, reduction)
        path = out / f"gantt_{instance_id}_{record['algorithm']}_{seed}.svg"
        path.write_text(svg, encoding="utf-8", newline="\n")
        written.append(path)
    return written
