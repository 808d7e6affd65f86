"""
Trial record files and summary tables.
"""

import csv

import numpy as np

from stlcbot.base.errors import BenchError
from stlcbot.bench.harness import TRIAL_FIELDS, TrialRecord

SUMMARY_FIELDS = (
    "env",
    "arm",
    "n_robots",
    "trials",
    "success_rate",
    "runtime_mean",
    "runtime_sd",
    "path_length_mean",
    "path_length_sd",
)

SUMMARY_NOTE = "runtime and path length are taken over solved trials only"


class RecordWriter(object):
    """
    CSV writer flushing after every record.
    """

    def __init__(self, path):
        self.path = path
        self.file = None
        self.writer = None

    def __enter__(self):
        try:
            self.file = open(self.path, "w", newline="")
        except (IOError, OSError) as e:
            raise BenchError("Cannot write {0}: {1}", self.path, e)
        self.writer = csv.writer(self.file, lineterminator="\n")
        self.writer.writerow(TRIAL_FIELDS)
        self.file.flush()
        return self

    def write(self, record):
        try:
            self.writer.writerow(record.row())
            self.file.flush()
        except (IOError, OSError) as e:
            raise BenchError("Cannot write {0}: {1}", self.path, e)

    def __exit__(self, *exc):
        self.file.close()
        return False


def emit_csv(records, path):
    """
    Writes records with a header row of TRIAL_FIELDS; an empty record set
    gives a header-only file.
    """

    with RecordWriter(path) as writer:
        for record in records:
            writer.write(record)


def load_records(path):
    try:
        with open(path, newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None or tuple(reader.fieldnames) != TRIAL_FIELDS:
                raise BenchError("{0} does not hold trial records", path)
            return [TrialRecord.from_row(row) for row in reader]
    except (IOError, OSError) as e:
        raise BenchError("Cannot read {0}: {1}", path, e)


def _mean_sd(values):
    if not values:
        return float("nan"), float("nan")
    values = np.array(values, dtype=float)
    sd = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return float(np.mean(values)), sd


def emit_summary(records):
    """
    Aggregates records by (env, arm, N): success rate in percent, and
    mean and sample standard deviation of runtime and path length over
    solved trials.

    :rtype: list(dict)
    """

    groups = {}
    for r in records:
        groups.setdefault((r.env, r.arm, r.n_robots), []).append(r)

    rows = []
    for (env, arm, n), items in sorted(groups.items()):
        solved = [r for r in items if r.solved]
        runtime = _mean_sd([r.wall_time for r in solved])
        length = _mean_sd([r.total_path_length for r in solved])
        rows.append(
            {
                "env": env,
                "arm": arm,
                "n_robots": n,
                "trials": len(items),
                "success_rate": 100.0 * len(solved) / len(items),
                "runtime_mean": runtime[0],
                "runtime_sd": runtime[1],
                "path_length_mean": length[0],
                "path_length_sd": length[1],
            }
        )
    return rows


def write_summary(rows, path):
    try:
        with open(path, "w", newline="") as f:
            f.write("# {0}\n".format(SUMMARY_NOTE))
            writer = csv.DictWriter(f, SUMMARY_FIELDS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    except (IOError, OSError) as e:
        raise BenchError("Cannot write {0}: {1}", path, e)


def format_summary(rows):
    """
    Plain-text table of a summary.
    """

    lines = [
        "{0:<10} {1:<8} {2:>3} {3:>8} {4:>17} {5:>17}".format(
            "env", "arm", "N", "success", "runtime (s)", "path length (m)"
        )
    ]
    for r in rows:
        lines.append(
            "{0:<10} {1:<8} {2:>3} {3:>7.0f}% {4:>8.3f} +- {5:<6.3f} {6:>8.3f} +- {7:<6.3f}".format(
                r["env"],
                r["arm"],
                r["n_robots"],
                r["success_rate"],
                r["runtime_mean"],
                r["runtime_sd"],
                r["path_length_mean"],
                r["path_length_sd"],
            )
        )
    lines.append("({0})".format(SUMMARY_NOTE))
    return "\n".join(lines)
