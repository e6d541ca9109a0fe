import re

import numpy as np
import pytest

from rsubgrad.cli import main, parse_seeds, run_instance
from rsubgrad.feasibility import generate_sphere
from rsubgrad.io import (
    TRACE_HEADER,
    ConfigError,
    dumps_instance,
    dumps_trace,
    loads_instance,
    loads_trace,
    parse_float,
    read_config,
    read_instance,
    read_report,
    read_trace,
)


def corrupt_gap(src, dst, row, factor=10.0):
    """Multiply the gap cell of one data row by ``factor``."""
    lines = src.read_text().splitlines()
    cells = lines[row + 1].split(",")
    cells[2] = repr(float(cells[2]) * factor)
    lines[row + 1] = ",".join(cells)
    dst.write_text("\n".join(lines) + "\n")


class TestGenerate:
    @pytest.mark.parametrize("kind", ["spd", "sphere"])
    def test_round_trip(self, kind, tmp_path):
        path = tmp_path / "inst.txt"
        assert main(["generate", "--manifold", kind, "--seed", "3", "--out", str(path)]) == 0
        inst = read_instance(str(path))
        again = loads_instance(dumps_instance(inst))
        assert dumps_instance(again) == path.read_text()
        for a, b in zip(inst.centers, again.centers):
            assert np.array_equal(a, b)
        assert np.array_equal(inst.q, again.q) and np.array_equal(inst.p0, again.p0)
        inst.check()

    def test_defaults_match_generator(self, tmp_path):
        path = tmp_path / "inst.txt"
        main(["generate", "--manifold", "sphere", "--seed", "5", "--out", str(path)])
        ref = generate_sphere(seed=5)
        inst = read_instance(str(path))
        assert np.array_equal(inst.q, ref.q) and np.array_equal(inst.p0, ref.p0)

    def test_bad_flag_names_field(self, tmp_path, capsys):
        code = main(["generate", "--manifold", "spd", "--n", "abc", "--out", str(tmp_path / "x")])
        assert code == 2
        assert "n" in capsys.readouterr().err

    def test_bad_config_names_field_and_line(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("manifold = spd\n# comment\neps = -1\n")
        code = main(["generate", "--config", str(cfg), "--out", str(tmp_path / "x")])
        assert code == 2
        err = capsys.readouterr().err
        assert "eps" in err

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("manifold = spd\ncolour = red\n")
        with pytest.raises(ConfigError) as info:
            read_config(str(cfg))
        assert info.value.field == "colour" and info.value.line == 2

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("manifold = sphere\nn = 12\nm = 4\nr = pi/16\nseed = 1\n")
        out = tmp_path / "inst.txt"
        assert main(["generate", "--config", str(cfg), "--n", "9", "--out", str(out)]) == 0
        inst = read_instance(str(out))
        assert inst.manifold.n == 9 and inst.m == 4


class TestRun:
    def test_trace_schema(self, tmp_path):
        out = tmp_path / "trace.csv"
        code = main(["run", "--manifold", "spd", "--n", "5", "--m", "4", "--seed", "1",
                     "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == TRACE_HEADER
        assert any(line.startswith("# reason=") for line in lines)
        trace, meta = read_trace(str(out))
        assert meta["rule"] == "exogenous" and meta["reason"] == "feasible"
        assert list(trace.column("k")) == list(range(len(trace)))

    def test_lambda_zero_single_row(self, tmp_path):
        out = tmp_path / "trace.csv"
        main(["run", "--manifold", "sphere", "--n", "10", "--m", "3", "--lambda", "0",
              "--out", str(out)])
        trace, meta = read_trace(str(out))
        assert len(trace) == 1 and meta["reason"] == "feasible at start"

    def test_instance_file(self, tmp_path):
        inst = tmp_path / "inst.txt"
        main(["generate", "--manifold", "sphere", "--n", "30", "--m", "10", "--seed", "2",
              "--out", str(inst)])
        out = tmp_path / "trace.csv"
        assert main(["run", "--instance", str(inst), "--out", str(out)]) == 0
        trace, meta = read_trace(str(out))
        assert meta["rule"] == "polyak"
        direct, _ = run_instance(read_instance(str(inst)), "polyak")
        assert np.array_equal(trace.values, direct.values)

    def test_full_precision(self, tmp_path):
        inst = generate_sphere(n=20, m=5, seed=4)
        trace, meta = run_instance(inst, "polyak")
        back, _ = loads_trace(dumps_trace(trace, meta))
        assert np.array_equal(back.values, trace.values)
        assert np.array_equal(back.steps, trace.steps, equal_nan=True)
        assert np.array_equal(back.dists, trace.dists)

    def test_seeds_and_jobs(self, tmp_path):
        pattern = str(tmp_path / "t{seed}.csv")
        args = ["run", "--manifold", "spd", "--n", "4", "--m", "3", "--seeds", "0-2",
                "--out", pattern]
        assert main(args + ["--jobs", "2"]) == 0
        parallel = [(tmp_path / f"t{s}.csv").read_bytes() for s in range(3)]
        assert main(args) == 0
        serial = [(tmp_path / f"t{s}.csv").read_bytes() for s in range(3)]
        assert parallel == serial

    def test_seeds_need_placeholder(self, tmp_path):
        code = main(["run", "--manifold", "spd", "--seeds", "0-2", "--out", str(tmp_path / "t.csv")])
        assert code == 2

    def test_parse_seeds(self):
        assert parse_seeds("0-3,7") == [0, 1, 2, 3, 7]

    def test_parse_float(self):
        assert parse_float("pi/16") == pytest.approx(np.pi / 16)
        assert parse_float("2pi") == pytest.approx(2 * np.pi)
        assert parse_float("0.25") == 0.25


@pytest.fixture
def spd_trace(tmp_path):
    out = tmp_path / "spd.csv"
    main(["run", "--manifold", "spd", "--seed", "0", "--out", str(out)])
    return out


@pytest.fixture
def sphere_trace(tmp_path):
    out = tmp_path / "sphere.csv"
    main(["run", "--manifold", "sphere", "--seed", "0", "--out", str(out)])
    return out


class TestCertify:
    def test_exogenous_ok(self, spd_trace, tmp_path, capsys):
        rep = tmp_path / "rep.csv"
        assert main(["certify", str(spd_trace), "--out", str(rep)]) == 0
        assert "OK" in capsys.readouterr().out
        report = read_report(str(rep))
        assert report.theorem == "exogenous"
        assert len(report) == len(read_trace(str(spd_trace))[0])
        assert report.min_margin >= -1e-7

    @pytest.mark.parametrize("theorem", ["exogenous", "exogenous-step", "quasi-fejer", "radius"])
    def test_exogenous_family(self, spd_trace, theorem):
        assert main(["certify", str(spd_trace), "--theorem", theorem]) == 0

    @pytest.mark.parametrize("theorem", ["polyak", "polyak-sum", "polyak-step"])
    def test_polyak_family(self, sphere_trace, theorem):
        assert main(["certify", str(sphere_trace), "--theorem", theorem, "--kappa", "0"]) == 0

    def test_negative_control_first_row(self, spd_trace, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        corrupt_gap(spd_trace, bad, 0)
        assert main(["certify", str(bad)]) == 1
        assert "VIOLATED at N=0" in capsys.readouterr().out

    def test_negative_control_interior_row(self, sphere_trace, tmp_path, capsys):
        # the summed-gap bound sees any inflated row
        trace, _ = read_trace(str(sphere_trace))
        row = len(trace) // 2
        bad = tmp_path / "bad.csv"
        corrupt_gap(sphere_trace, bad, row, factor=1e3)
        assert main(["certify", str(bad), "--theorem", "polyak-sum"]) == 1
        out = capsys.readouterr().out
        n = int(re.search(r"VIOLATED at N=(\d+)", out).group(1))
        assert n == row

    def test_exit_status_matches_margin(self, spd_trace, tmp_path):
        rep = tmp_path / "rep.csv"
        for theorem in ("exogenous", "exogenous-step"):
            code = main(["certify", str(spd_trace), "--theorem", theorem, "--out", str(rep)])
            assert code == (0 if read_report(str(rep)).min_margin >= -1e-7 else 1)

    def test_schema_mismatch(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("k,f\n0,1\n")
        assert main(["certify", str(bad), "--theorem", "exogenous", "--kappa", "0"]) == 2

    def test_missing_theorem(self, tmp_path):
        t = tmp_path / "t.csv"
        t.write_text(TRACE_HEADER + "\n0,1,1,1,1,1\n")
        assert main(["certify", str(t)]) == 2


class TestPlot:
    def test_two_polylines(self, tmp_path):
        rep = tmp_path / "rep.csv"
        rep.write_text("N,lhs,rhs,margin\n0,0.5,1,0.5\n1,0.25,0.7,0.45\n")
        svg = tmp_path / "p.svg"
        assert main(["plot", str(rep), "--out", str(svg)]) == 0
        text = svg.read_text()
        assert text.count("<polyline") == 2
        assert text.startswith("<svg") or text.startswith("<?xml")

    def test_rhs_monotone_in_plot(self, spd_trace, tmp_path):
        rep, svg = tmp_path / "rep.csv", tmp_path / "p.svg"
        main(["certify", str(spd_trace), "--out", str(rep)])
        main(["plot", str(rep), "--out", str(svg)])
        rhs_line = [m for m in re.findall(r'<polyline[^>]*>', svg.read_text()) if "#d62728" in m][0]
        pts = re.search(r'points="([^"]*)"', rhs_line).group(1).split()
        xs = [float(p.split(",")[0]) for p in pts]
        ys = [float(p.split(",")[1]) for p in pts]
        assert all(b > a for a, b in zip(xs, xs[1:]))
        # the bound decreases in N, so SVG y (pointing down) increases
        assert all(b >= a for a, b in zip(ys, ys[1:]))

    def test_deterministic(self, spd_trace, tmp_path):
        rep = tmp_path / "rep.csv"
        main(["certify", str(spd_trace), "--out", str(rep)])
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        main(["plot", str(rep), "--out", str(a), "--title", "run"])
        main(["plot", str(rep), "--out", str(b), "--title", "run"])
        assert a.read_bytes() == b.read_bytes()

    def test_empty_report(self, tmp_path):
        rep = tmp_path / "rep.csv"
        rep.write_text("N,lhs,rhs,margin\n")
        assert main(["plot", str(rep), "--out", str(tmp_path / "p.svg")]) == 2
