import subprocess
import sys

import pytest

from gdnc.cli import main, parse_snr_grid

FIX = "tests/fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_snr_grid():
    assert parse_snr_grid("0:10:5") == [0.0, 5.0, 10.0]
    assert parse_snr_grid("1,2.5") == [1.0, 2.5]
    assert parse_snr_grid("0:1:0.1")[-1] == 1.0


@pytest.mark.parametrize("shape,q,rows,cols", [((2, 2, 2), "2^3", 4, 4), ((2, 1, 1), "2^2", 2, 2), ((3, 1, 2), "3^2", 3, 6)])
def test_design(capsys, shape, q, rows, cols):
    M, k1, k2 = shape
    code, out, err = run(capsys, "design", "-M", str(M), "--k1", str(k1), "--k2", str(k2))
    assert code == 0
    assert out.splitlines()[0].startswith(f"q={q} ")
    assert f"rows={rows} cols={cols}" in out
    assert err.startswith("MDS, d_min=")


def test_design_to_file_then_verify(capsys, tmp_path):
    path = tmp_path / "p.txt"
    assert run(capsys, "design", "-M", "2", "--k1", "2", "--k2", "2", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "verify", "--matrix", str(path))
    assert code == 0 and "guaranteed diversity: 4" in out


def test_verify_reference_and_counterexample(capsys):
    code, out, _ = run(capsys, "verify", "--matrix", f"{FIX}/m2_k1_2_k2_2_gf8.txt")
    assert code == 0
    for key in ("shape:", "mds: yes", "d_min: 5", "composite distance: 4", "guaranteed diversity: 4", "witness: ["):
        assert key in out
    code, out, _ = run(capsys, "verify", "--matrix", f"{FIX}/nonmds_d3_gf8.txt")
    assert code == 1 and "guaranteed diversity: 3" in out


def test_verify_usage_errors(capsys):
    code, _, err = run(capsys, "verify", "--matrix", f"{FIX}/m2_k1_2_k2_2_gf8.txt", "--k2", "1")
    assert code == 2 and "needs" in err
    assert run(capsys, "verify", "--matrix", "missing.txt")[0] == 2
    assert run(capsys, "verify")[0] == 2
    assert run(capsys, "bogus")[0] == 2


def test_verify_budget(capsys):
    code, _, err = run(capsys, "verify", "--matrix", f"{FIX}/m3_k1_2_k2_2_gf16.txt", "--max-patterns", "2")
    assert code == 3 and "composite distance <=" in err


def test_verify_alternate_modulus(capsys):
    path = f"{FIX}/m2_k1_1_k2_2_gf8.txt"
    code, out, _ = run(capsys, "verify", "--matrix", path)
    assert "mds: no" in out
    code, out, _ = run(capsys, "verify", "--matrix", path, "--field", "2^3/1101")
    assert "mds: yes" in out and code == 0


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", "-M", "2", "--k1", "2", "--k2", "2", "--snr-db", "10:20:10",
                       "--schemes", "bnc,gdnc")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "snr_db,pe,scheme,mode,p_outage"
    modes = {ln.split(",")[3] for ln in lines[1:] if ",gdnc," in ln}
    assert modes == {"exact", "leading", "band-lo", "band-hi"}
    assert len(lines) == 1 + 2 + 8
    code, out, _ = run(capsys, "analyze", "--schemes", "")
    assert out == "snr_db,pe,scheme,mode,p_outage\n"
    assert run(capsys, "analyze", "--schemes", "nope")[0] == 2


SIM = ["simulate", "-M", "2", "--k1", "2", "--k2", "2", "--matrix", f"{FIX}/m2_k1_2_k2_2_gf8.txt",
       "--snr-db", "0:10:5", "--trials", "20000", "--seed", "42"]


def test_simulate_byte_identical(capsys, tmp_path):
    outs = []
    for i, workers in enumerate(["1", "1", "4"]):
        path = tmp_path / f"run{i}.csv"
        assert run(capsys, *SIM, "--workers", workers, "--out", str(path))[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    assert b"frame_errors" in outs[0]


def test_simulate_errors(capsys, tmp_path):
    assert run(capsys, *SIM[:-4], "--trials", "0")[0] == 2
    assert run(capsys, *SIM, "--out", str(tmp_path / "nope" / "x.csv"))[0] == 2
    assert run(capsys, "simulate", "--scheme", "bnc2", "--channel-mode", "erasure", "--trials", "10")[0] == 2


def test_simulate_baseline_and_pe_grid(capsys):
    code, out, _ = run(capsys, "simulate", "--scheme", "daf2", "--pe", "0.2,0.1", "--trials", "2000")
    assert code == 0
    rows = [ln for ln in out.splitlines() if ln.startswith("daf2,")]
    assert len(rows) == 2 and float(rows[0].split(",")[6]) == pytest.approx(0.2)


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nusers = 2\nk1 = 2\nk2 = 2\ntrials = 1000\nseed = 9\nsnr-db = 5,10\n")
    code, out, _ = run(capsys, "--config", str(cfg), "simulate")
    assert code == 0 and "# seed=9" in out and ",1000," in out
    code, out, _ = run(capsys, "--config", str(cfg), "simulate", "--seed", "3")
    assert "# seed=3" in out
    assert run(capsys, "--config", str(tmp_path / "missing.cfg"), "simulate")[0] == 2


def test_compare(capsys, tmp_path):
    out_dir = tmp_path / "cmp"
    code, _, _ = run(capsys, "compare", "--schemes", "bnc2,dnc,gdnc", "-M", "2", "--k1", "2", "--k2", "2",
                     "--matrix", f"{FIX}/m2_k1_2_k2_2_gf8.txt", "--snr-db", "5:10:5", "--trials", "500",
                     "--out-dir", str(out_dir))
    assert code == 0
    names = sorted(p.name for p in out_dir.iterdir())
    assert names == ["analysis.csv", "sim_bnc2.csv", "sim_dnc.csv", "sim_gdnc.csv"]
    # DNC uses its own GF(4) design, not the GDNC matrix
    assert "\ndnc,2,1,1,4," in (out_dir / "sim_dnc.csv").read_text()
    assert "\ngdnc,2,2,2,8," in (out_dir / "sim_gdnc.csv").read_text()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "gdnc", "design", "-M", "2", "--k1", "1", "--k2", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("q=2^2")
