import json

import numpy as np

import aperiodica as ap
from aperiodica.cli import main

PAPERFOLDING_RULE = "a: ab\nb: cb\nc: ad\nd: cd\n"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDispatch:
    def test_unknown_subcommand_exits_64(self, capsys):
        code, _, err = run_cli(capsys, "frobnicate")
        assert code == 64
        assert "unknown subcommand" in err

    def test_no_arguments_prints_usage(self, capsys):
        code, _, _ = run_cli(capsys)
        assert code == 64

    def test_help_exits_zero(self, capsys):
        code, out, _ = run_cli(capsys, "--help")
        assert code == 0
        assert "commands:" in out

    def test_bad_flag_exits_2(self, capsys):
        code, _, _ = run_cli(capsys, "coincide", "--no-such-flag")
        assert code == 2

    def test_missing_input_file_exits_2(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "autocorr", "--input",
                               str(tmp_path / "none.csv"), "--max-diff", "2")
        assert code == 2
        assert "not found" in err


class TestCoincide:
    def test_paperfolding_output(self, capsys, tmp_path):
        rule = tmp_path / "paperfolding.rule"
        rule.write_text(PAPERFOLDING_RULE)
        code, out, _ = run_cli(capsys, "coincide", "--rule", str(rule))
        assert code == 0
        assert "coincidence at power 2" in out

    def test_thue_morse_never(self, capsys, tmp_path):
        rule = tmp_path / "tm.rule"
        rule.write_text("a: ab\nb: ba\n")
        code, out, _ = run_cli(capsys, "coincide", "--rule", str(rule))
        assert code == 0
        assert "proven never" in out


class TestGenerate:
    def scheme_file(self, tmp_path):
        path = tmp_path / "scheme.json"
        path.write_text(json.dumps({
            "kind": "qadic", "q": 2,
            "paperfolding": {"fixed_point": "w1", "letters": ["a", "b"]},
        }))
        return path

    def test_generate_comb_csv(self, capsys, tmp_path):
        out = tmp_path / "comb.csv"
        code, _, _ = run_cli(capsys, "generate", "--scheme",
                             str(self.scheme_file(tmp_path)),
                             "--region", "0,10", "--output", str(out))
        assert code == 0
        comb = ap.read_comb_csv(out)
        assert comb.positions.tolist() == [0, 1, 3, 4, 7, 8, 9]

    def test_euclidean_scheme(self, capsys, tmp_path):
        path = tmp_path / "fib.json"
        path.write_text(json.dumps({
            "kind": "euclidean", "theta": "tau",
            "window": [[-0.3, 0.7]],
        }))
        out = tmp_path / "fib.csv"
        code, _, _ = run_cli(capsys, "generate", "--scheme", str(path),
                             "--region", "0,30", "--output", str(out))
        assert code == 0
        comb = ap.read_comb_csv(out)
        scheme = ap.fibonacci_scheme()
        window = ap.EuclideanWindow(((-0.3, 0.7),))
        expected = ap.generate_model_set(scheme, window, (0, 30))
        assert np.allclose(comb.positions, expected.positions)


class TestPipelines:
    def comb_file(self, tmp_path):
        comb = ap.WeightedComb.from_integers(np.arange(-64, 65),
                                             np.ones(129), 64.0)
        path = tmp_path / "z.csv"
        ap.write_comb_csv(comb, path)
        return path

    def test_autocorr_csv(self, capsys, tmp_path):
        out = tmp_path / "eta.csv"
        code, _, _ = run_cli(capsys, "autocorr", "--input",
                             str(self.comb_file(tmp_path)),
                             "--max-diff", "5", "--output", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "z,re_eta,im_eta"
        rows = {float(r.split(",")[0]): float(r.split(",")[1]) for r in lines[1:]}
        assert abs(rows[1.0] - 1.0) < 1e-12

    def test_spectrum_and_bragg(self, capsys, tmp_path):
        out = tmp_path / "atoms.csv"
        code, _, _ = run_cli(capsys, "spectrum", "--input",
                             str(self.comb_file(tmp_path)), "--kmax", "1.5",
                             "--bragg", "0.5", "--output", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "k,intensity"
        ks = [float(r.split(",")[0]) for r in lines[1:]]
        assert any(abs(k - 1.0) < 1e-6 for k in ks)

    def test_json_format(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "spectrum", "--input",
                               str(self.comb_file(tmp_path)), "--kmax", "0.1",
                               "--dk", "0.05", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["columns"] == ["k", "value"]
        assert len(payload["rows"]) == 3


class TestRandomTiling:
    def test_sample_deterministic_bytes(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            code, _, _ = run_cli(capsys, "randomtiling", "--u", "tau", "--v", "1",
                                 "--p", "1/tau", "--intervals", "200",
                                 "--seed", "7", "--output", str(path))
            assert code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_heights_output(self, capsys, tmp_path):
        out = tmp_path / "heights.csv"
        code, _, _ = run_cli(capsys, "randomtiling", "--u", "tau", "--v", "1",
                             "--p", "1/tau", "--intervals", "50", "--seed", "3",
                             "--heights", "--output", str(out))
        assert code == 0
        assert out.read_text().splitlines()[0] == "x,height"

    def test_closed_form_spectrum_files(self, capsys, tmp_path):
        base = tmp_path / "spec"
        code, _, _ = run_cli(capsys, "randomtiling", "--u", "2", "--v", "1",
                             "--p", "0.5", "--spectrum", "--kmax", "2",
                             "--output", str(base))
        assert code == 0
        pp = (tmp_path / "spec.pp.csv").read_text().splitlines()
        ac = (tmp_path / "spec.ac.csv").read_text().splitlines()
        assert pp[0] == "k,intensity"
        assert ac[0] == "k,g"
        intensities = {float(r.split(",")[1]) for r in pp[1:]}
        assert all(abs(v - 4.0 / 9.0) < 1e-12 for v in intensities)

    def test_threads_validated(self, capsys):
        code, _, _ = run_cli(capsys, "randomtiling", "--u", "2", "--v", "1",
                             "--p", "0.5", "--intervals", "10", "--threads", "0")
        assert code == 2


class TestPaperfoldingSpectrumCommand:
    def test_binary_weights(self, capsys):
        code, out, _ = run_cli(capsys, "paperfolding-spectrum", "--weights",
                               "1,1,0,0", "--rmax", "4", "--kmax", "1")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "k,intensity"
        rows = {float(r.split(",")[0]): float(r.split(",")[1]) for r in lines[1:]}
        assert rows[1.0] == 0.25
        assert rows[0.25] == 1.0 / 16.0


class TestCompare:
    def test_paperfolding_passes(self, capsys):
        code, out, _ = run_cli(capsys, "compare", "--model",
                               "paperfolding-binary", "--tolerance", "0.005",
                               "--log2n", "12")
        assert code == 0
        assert "comparison passed" in out

    def test_impossible_tolerance_fails_with_3(self, capsys):
        code, out, _ = run_cli(capsys, "compare", "--model",
                               "paperfolding-binary", "--tolerance", "1e-12",
                               "--log2n", "10")
        assert code == 3
        assert "FAILED" in out

    def test_rational_pp_model(self, capsys):
        code, out, _ = run_cli(capsys, "compare", "--model", "rational-pp",
                               "--tolerance", "0.02", "--seeds", "5",
                               "--intervals", "20000")
        assert code == 0

    def test_unknown_model_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "compare", "--model", "nope",
                               "--tolerance", "0.1")
        assert code == 2
