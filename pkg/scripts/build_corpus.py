"""Regenerate src/rewrite_rl/data/corpus.json from the labeled snippets.

Labels are hand-assigned readiness judgements for illustration only:
FPGA needs flat arrays, no calls, no shifted or irregular writes and static
limits; GPU needs flat arrays and regular loops; DM-CPU needs chunked
(loop_schedule) loops; SM-CPU accepts almost anything without early exits.
"""

import json
from pathlib import Path

from rewrite_rl.abstraction import extract
from rewrite_rl.codemodel import parse
from rewrite_rl.rules import apply_rule, find_sites

DATA = Path(__file__).resolve().parents[1] / "src" / "rewrite_rl" / "data"

LABELS = {
    "vector_add": ["FPGA", "GPU", "SM_CPU", "DM_CPU"],
    "matmul": ["SM_CPU"],
    "matmul_flat": ["GPU", "SM_CPU"],
    "shifted_writes": ["GPU", "SM_CPU"],
    "search_break": ["SM_CPU"],
    "dynamic_limits": ["SM_CPU"],
    "chunked_sum": ["SM_CPU", "DM_CPU"],
    "aux_index": ["SM_CPU"],
    "global_accumulate": ["SM_CPU"],
    "threshold": ["FPGA", "GPU", "SM_CPU"],
    "prefix_sum": ["FPGA", "SM_CPU"],
    "rgb_split": ["SM_CPU"],
    "strided_copy": ["FPGA", "GPU", "SM_CPU"],
}

# convolution after 0..4 steps of R0, R0, R0, R1
CONVOLUTION = [["SM_CPU"], ["SM_CPU"], ["SM_CPU"], ["GPU", "SM_CPU"], ["FPGA", "GPU", "SM_CPU"]]


def main():
    records = []
    for name, classes in LABELS.items():
        unit = parse((DATA / "snippets" / f"{name}.c").read_text())
        records.append({"name": name, "features": list(extract(unit)), "classes": classes})
    unit = parse((DATA / "convolution.c").read_text())
    for step, classes in enumerate(CONVOLUTION):
        if step:
            rule = 1 if step == 4 else 0
            unit = apply_rule(unit, rule, find_sites(unit, rule)[0]).unit
        records.append({"name": f"convolution_step{step}", "features": list(extract(unit)), "classes": classes})
    seen = {}
    for rec in records:
        key = tuple(rec["features"])
        if key in seen and seen[key] != rec["classes"]:
            raise SystemExit(f"{rec['name']} collides with a differently labeled sample")
        seen[key] = rec["classes"]
    lines = ",\n".join("  " + json.dumps(r) for r in records)
    (DATA / "corpus.json").write_text("[\n" + lines + "\n]\n")
    print(f"wrote {len(records)} samples")


if __name__ == "__main__":
    main()
