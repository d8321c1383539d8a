from isogrow.cli import main
from isogrow.lattice import DomainSpec


def _count_vertices(spec: DomainSpec) -> int:
    return sum(1 for m in range(-spec.m_max, spec.m_max + 1, 2)
               for n in range(-spec.m_max, spec.m_max + 1, 2)
               if m % 2 == 0 and n % 2 == 0 and spec.contains((m, n)))


def test_grow_writes_obj_with_expected_counts(tmp_path, capsys):
    out = tmp_path / "sphere.obj"
    code = main(["grow", "--surface", "sphere_mercator", "--eps", "0.1",
                 "--r", "1.0", "--h", "0.3", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    n_v = sum(1 for ln in lines if ln.startswith("v "))
    n_f = sum(1 for ln in lines if ln.startswith("f "))
    assert n_v == _count_vertices(DomainSpec(r=1.0, h=0.3, eps=0.1))
    assert n_f > 0


def test_grow_rejects_eps_not_below_h(tmp_path):
    code = main(["grow", "--surface", "cylinder", "--eps", "0.3", "--h", "0.3",
                 "--out", str(tmp_path / "x.obj")])
    assert code == 2


def test_grow_exports_quantities(tmp_path):
    out = tmp_path / "c.obj"
    qcsv = tmp_path / "q.csv"
    code = main(["grow", "--surface", "cylinder", "--eps", "0.1", "--h", "0.2",
                 "--out", str(out), "--export-quantities", str(qcsv)])
    assert code == 0
    assert qcsv.read_text().startswith("m,n,slot,quantity,value")


def test_transform_darboux_requires_nonzero_C(tmp_path):
    code = main(["transform", "--surface", "cylinder", "--eps", "0.1", "--h", "0.2",
                 "--kind", "darboux", "--C", "0", "--out", str(tmp_path / "d.obj")])
    assert code == 2


def test_transform_christoffel(tmp_path, capsys):
    out = tmp_path / "dual.obj"
    code = main(["transform", "--surface", "cylinder", "--eps", "0.1", "--h", "0.2",
                 "--kind", "christoffel", "--out", str(out)])
    assert code == 0
    assert "closedness" in capsys.readouterr().out
    assert out.exists()


def test_transform_darboux(tmp_path, capsys):
    out = tmp_path / "plus.obj"
    code = main(["transform", "--surface", "cylinder", "--eps", "0.1", "--h", "0.2",
                 "--kind", "darboux", "--C", "1.0", "--seed", "1.4,0.25,0.3",
                 "--out", str(out)])
    assert code == 0
    assert "cross-ratio" in capsys.readouterr().out
    assert out.exists()


def test_converge_runs(tmp_path, capsys):
    base = tmp_path / "conv"
    code = main(["converge", "--surface", "cylinder", "--eps-list", "0.1,0.05",
                 "--r", "1.0", "--h", "0.3", "--out", str(base)])
    assert code == 0
    assert (tmp_path / "conv.csv").exists()
    assert (tmp_path / "conv.txt").exists()


def test_check_passes_on_cylinder(capsys):
    code = main(["check", "--surface", "cylinder", "--eps", "0.1", "--h", "0.2"])
    assert code == 0
    assert "PASS" in capsys.readouterr().out


def test_config_file_with_overrides(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        "[surface]\nkind = \"cylinder\"\n"
        "[lattice]\nr = 1.0\nh = 0.2\neps = 0.2\n"
        "[run]\nout = \"ignored.obj\"\n")
    out = tmp_path / "c.obj"
    # flag overrides config eps
    code = main(["grow", "--config", str(cfg), "--eps", "0.1", "--out", str(out)])
    assert code == 0
    assert out.exists()


def test_user_curve_config(tmp_path):
    cfg = tmp_path / "user.toml"
    cfg.write_text(
        "[surface]\n"
        "kind = \"user_curve\"\n"
        "f_poly = [[0.0, 1.0], [0.0], [0.0]]\n"
        "f_trig = [[], [], []]\n"
        "n_poly = [[0.0], [0.0], [1.0]]\n"
        "n_trig = [[], [], []]\n"
        "[lattice]\nr = 1.0\nh = 0.2\neps = 0.1\n")
    out = tmp_path / "flat.obj"
    code = main(["grow", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    # a flat strip grows into a plane: all z coordinates stay zero
    zs = [float(ln.split()[3]) for ln in out.read_text().splitlines()
          if ln.startswith("v ")]
    assert max(abs(z) for z in zs) < 1e-12


def test_obj_deterministic(tmp_path):
    a, b = tmp_path / "a.obj", tmp_path / "b.obj"
    for path in (a, b):
        assert main(["grow", "--surface", "sphere_mercator", "--eps", "0.1",
                     "--h", "0.3", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_usage_error_exit_code():
    assert main(["grow", "--surface", "unknown_surface", "--eps", "0.1", "--h", "0.2"]) == 2
    assert main(["nonsense"]) == 2


def test_numerical_failure_exit_code(tmp_path, capsys):
    # a Darboux seed on the surface itself collapses the pair: exit 3
    code = main(["transform", "--surface", "cylinder", "--eps", "0.1", "--h", "0.2",
                 "--kind", "darboux", "--C", "1.0", "--seed", "1,0,0",
                 "--out", str(tmp_path / "d.obj")])
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err
