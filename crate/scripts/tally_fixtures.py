"""Tallies the planted outcomes of the replay fixtures into expected.json.

Counts come from the hand-written responses and their planted markers only,
never from the Rust checker, so the pipeline tests compare against an
independent source. Run from the repository root:

    python3 scripts/tally_fixtures.py
"""

import json
import re
from collections import OrderedDict

RULES = ["MP", "MT", "DS", "HS", "Simp", "Conj", "Add", "CD", "Contra", "Com", "DeM", "Impl", "DN", "CP"]
LEVELS = ["pretest", "train1", "train2", "train3", "train4", "train5", "posttest"]


def answer(text):
    """The JSON answer in a response: fenced block first, else the first brace or bracket."""
    m = re.search(r"```(?:json)?\s*\n(.*?)```", text, re.S)
    if m:
        return json.loads(m.group(1))
    start = min(i for i in (text.find("{"), text.find("[")) if i >= 0)
    return json.JSONDecoder().raw_decode(text[start:])[0]


def pct(correct, n):
    return round(correct * 100.0 / n, 2)


def table(rows, order, key):
    groups = OrderedDict((k, [0, 0]) for k in order)
    for r in rows:
        groups[r[key]][0] += 1
        groups[r[key]][1] += r["correct"]
    return [{"key": k, "n": n, "correct": c, "accuracy": pct(c, n)} for k, (n, c) in groups.items() if n]


def levels():
    with open("data/problems/lt20.json") as f:
        return {p["id"]: p["level"] for p in json.load(f)["problems"]}


def tally_prove(fixture, level_of):
    rows = []
    for r in fixture["responses"]:
        steps = answer(r["text"])
        steps = steps["steps"] if isinstance(steps, dict) else steps
        for i, s in enumerate(steps, 1):
            rows.append({"rule": s["rule"], "level": level_of[r["problem"]], "correct": i not in r["planted_invalid"]})
    correct = sum(r["correct"] for r in rows)
    return {
        "rows": len(rows),
        "correct": correct,
        "accuracy": pct(correct, len(rows)),
        "by_rule": table(rows, RULES, "rule"),
        "by_level": table(rows, LEVELS, "level"),
    }


def tally_hint(fixture, level_of):
    rows, failures, unique = [], 0, OrderedDict()
    for r in fixture["responses"]:
        if r["expected"] == "parse_failure":
            failures += 1
            continue
        a = answer(r["text"])
        step = a.get("step", a)
        rows.append({
            "rule": step["rule"],
            "level": level_of[r["problem"]],
            "correct": r["expected"] == "correct",
            "reason": r["expected"],
        })
        key = (step["formula"], step["rule"], tuple(step["parents"]))
        unique.setdefault(r["problem"], set()).add(key)
    breakdown = []
    for rule in RULES:
        mine = [r for r in rows if r["rule"] == rule]
        if not mine:
            continue
        reasons = {}
        for r in mine:
            if not r["correct"]:
                reasons[r["reason"]] = reasons.get(r["reason"], 0) + 1
        ok = sum(r["correct"] for r in mine)
        breakdown.append({"rule": rule, "correct": ok, "incorrect": len(mine) - ok, "reasons": dict(sorted(reasons.items()))})
    per_problem = [{"problem": p, "count": len(s)} for p, s in sorted(unique.items())]
    correct = sum(r["correct"] for r in rows)
    return {
        "rows": len(rows),
        "correct": correct,
        "accuracy": pct(correct, len(rows)),
        "failures": failures,
        "by_rule": table(rows, RULES, "rule"),
        "by_level": table(rows, LEVELS, "level"),
        "breakdown": breakdown,
        "unique_hints": {
            "per_problem": per_problem,
            "mean": sum(c["count"] for c in per_problem) / len(per_problem),
        },
    }


def main():
    level_of = levels()
    for run in ["run1", "hints1"]:
        with open(f"data/fixtures/{run}/responses.json") as f:
            fixture = json.load(f)
        tally = tally_prove if fixture["task"] == "prove" else tally_hint
        out = tally(fixture, level_of)
        with open(f"data/fixtures/{run}/expected.json", "w") as f:
            json.dump(out, f, indent=2)
            f.write("\n")
        print(run, out["correct"], "of", out["rows"], "->", out["accuracy"])


if __name__ == "__main__":
    main()
