"""End-to-end checks of the heatshape command line tool.

usage: test_cli.py <heatshape executable> <configs dir>
"""

import csv
import filecmp
import subprocess
import sys
import tempfile
from pathlib import Path

EXE = Path(sys.argv[1])
CONFIGS = Path(sys.argv[2])
FAILURES = []

SMALL = """[geometry]
center_x = 0.5
center_y = {cy}
margin = 0.05

[physics]
boundary_temperature = {um}

[discretization]
h = 0.05
interface_segments = 32
time_steps = 10

[functional]
target = {target}
{extra}
[optimizer]
max_iters = 4
"""


def run(*args):
    return subprocess.run([str(EXE), *map(str, args)], capture_output=True, text=True)


def check(name, cond, detail=""):
    print(("PASS " if cond else "FAIL ") + name + ("" if cond else ": " + detail))
    if not cond:
        FAILURES.append(name)


def write(path, text):
    path.write_text(text)
    return path


def small(tmp, name, cy=0.5, um=500, target="constant", extra=""):
    return write(tmp / name, SMALL.format(cy=cy, um=um, target=target, extra=extra))


def summary(out):
    with open(out / "summary.csv", newline="") as f:
        return next(csv.DictReader(f))


def main():
    with tempfile.TemporaryDirectory() as d:
        tmp = Path(d)

        cfg = small(tmp, "base.ini")
        r = run("solve", "--config", cfg, "--out", tmp / "solve")
        check("solve exits 0", r.returncode == 0, r.stderr)
        s = summary(tmp / "solve")
        check("solve reports positive J", float(s["J"]) > 0, s["J"])
        check("solve is dissipative", s["dissipative"] == "true", str(s))

        r = run("solve", "--config", small(tmp, "cold.ini", um=0), "--out", tmp / "cold")
        check("zero boundary temperature gives J = 0", r.returncode == 0 and summary(tmp / "cold")["J"] == "0",
              r.stderr)

        bad = write(tmp / "bad_radius.ini", "[geometry]\nradius = 0.6\n")
        r = run("solve", "--config", bad)
        check("oversized disc exits 2", r.returncode == 2, f"rc={r.returncode}")
        check("oversized disc message", "disc not interior" in r.stderr, r.stderr)

        bad = write(tmp / "bad_key.ini", "[geometry]\ncenter_x = 0.5\nwidth = 3\n")
        r = run("solve", "--config", bad)
        check("unknown key exits 2", r.returncode == 2, f"rc={r.returncode}")
        check("unknown key names line and key", "bad_key.ini:3" in r.stderr and "'width'" in r.stderr, r.stderr)

        r = run("solve", "--config", tmp / "missing.ini")
        check("missing config exits 2", r.returncode == 2, f"rc={r.returncode}")

        r = run("solve")
        check("missing --config exits 2", r.returncode == 2, f"rc={r.returncode}")

        ref = small(tmp, "ref.ini", cy=0.6)
        r = run("record-target", "--config", ref)
        check("record-target without --out exits 2", r.returncode == 2, f"rc={r.returncode}")
        r = run("record-target", "--config", ref, "--out", tmp / "rec")
        check("record-target exits 0", r.returncode == 0, r.stderr)
        target = tmp / "rec" / "target.bin"
        check("record-target writes target.bin", target.is_file())

        replay = small(tmp, "replay.ini", cy=0.6, target="recorded", extra=f"target_file = {target}\n")
        r = run("solve", "--config", replay, "--out", tmp / "replay")
        check("recorded target self replay gives J = 0",
              r.returncode == 0 and float(summary(tmp / "replay")["J"]) == 0.0, r.stderr)

        away = small(tmp, "away.ini", cy=0.45, target="recorded", extra=f"target_file = {target}\n")
        r = run("solve", "--config", away, "--out", tmp / "away")
        check("recorded target away from reference gives J > 0",
              r.returncode == 0 and float(summary(tmp / "away")["J"]) > 0, r.stderr)

        r = run("fd-check", "--config", CONFIGS / "fd_constant.ini", "--out", tmp / "fd")
        check("fd-check passes", r.returncode == 0, r.stdout + r.stderr)
        with open(tmp / "fd" / "density.csv", newline="") as f:
            header = next(csv.reader(f))
        check("density csv header",
              header == ["arc_param", "x", "y", "G"] + [f"term{i}" for i in range(1, 7)], str(header))

        r = run("fd-check", "--config", CONFIGS / "fd_constant.ini", "--out", tmp / "fd_flip",
                "--flip-density-sign")
        check("fd-check with flipped density exits 4", r.returncode == 4, f"rc={r.returncode}")

        r = run("mesh-dump", "--config", cfg, "--out", tmp / "mesh")
        vtk = tmp / "mesh" / "mesh.vtk"
        ok = r.returncode == 0 and vtk.is_file()
        text = vtk.read_text() if ok else ""
        check("mesh-dump writes legacy VTK",
              ok and text.startswith("# vtk DataFile") and "UNSTRUCTURED_GRID" in text and "CELL_DATA" in text,
              r.stderr)

        dump = write(tmp / "dump.ini", SMALL.format(cy=0.5, um=500, target="constant", extra="")
                     + "\n[output]\ndump_fields = true\n")
        r = run("solve", "--config", dump, "--out", tmp / "dump")
        check("field dumps named by step",
              r.returncode == 0 and (tmp / "dump" / "field_forward_0000.vtk").is_file()
              and (tmp / "dump" / "field_forward_0010.vtk").is_file(), r.stderr)

        opt = small(tmp, "opt.ini", cy=0.3, target="zero")
        r1 = run("optimize", "--config", opt, "--out", tmp / "opt1")
        r2 = run("optimize", "--config", opt, "--out", tmp / "opt2")
        check("optimize exits 0", r1.returncode == 0 and r2.returncode == 0, r1.stderr)
        same = all(filecmp.cmp(tmp / "opt1" / n, tmp / "opt2" / n, shallow=False)
                   for n in ("history.csv", "density.csv", "summary.csv"))
        check("optimize output is bitwise deterministic", same)
        with open(tmp / "opt1" / "history.csv", "rb") as f:
            raw = f.read()
        check("history csv uses CRLF", b"\r\n" in raw and raw.count(b"\n") == raw.count(b"\r\n"))

        r3 = run("optimize", "--config", tmp / "opt1" / "effective_config.ini", "--out", tmp / "opt3")
        check("effective config reproduces the run",
              r3.returncode == 0 and filecmp.cmp(tmp / "opt1" / "history.csv", tmp / "opt3" / "history.csv",
                                                 shallow=False), r3.stderr)

    print(f"{len(FAILURES)} failure(s)")
    return 1 if FAILURES else 0


if __name__ == "__main__":
    sys.exit(main())
