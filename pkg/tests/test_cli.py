import json
import subprocess
import sys

import pytest

from lossygossip import cli
from lossygossip import gossip as gb
from lossygossip.detours import single_detour_path


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


@pytest.fixture
def car_bike(tmp_path):
    car = tmp_path / "car.txt"
    bike = tmp_path / "bike.txt"
    car.write_text("0 90 140\n90 0 60\n140 60 0\n")
    bike.write_text("0 630 640\n630 0 20\n640 20 0\n")
    return str(car), str(bike)


def test_tropmul_text(capsys, car_bike):
    code, out = run(capsys, "tropmul", *car_bike, "--format", "text")
    assert code == 0
    assert [line.split(",") for line in out.strip().splitlines()] == \
        [["0", "90", "110"], ["90", "0", "20"], ["140", "20", "0"]]


def test_tropmul_json(capsys, car_bike):
    code, out = run(capsys, "tropmul", *car_bike)
    obj = json.loads(out)
    assert code == 0 and "text" not in obj
    assert obj["product"]["entries"][0] == ["0", "90", "110"]


def test_metric_check_and_calls(capsys, car_bike):
    code, out = run(capsys, "metric-check", car_bike[0], "--as-calls")
    obj = json.loads(out)
    assert obj["is_metric"] and len(obj["calls"]["calls"]) == 3
    assert obj["symmetric_core"] == [[1, 2], [1, 3], [2, 3]]


def test_kleene(capsys, tmp_path):
    p = tmp_path / "a.txt"
    p.write_text("0 3 7\n3 0 4\ninf 4 0\n")
    code, out = run(capsys, "kleene", str(p))
    assert code == 0 and json.loads(out)["star"]["entries"][2] == ["7", "4", "0"]


def test_core_witness_csv(capsys):
    code, out = run(capsys, "core-witness", "--n", "3", "--edges", "1-2,2-3", "--format", "csv")
    assert code == 0 and out.startswith("key,value")
    assert "symmetric_core" in out


def test_gossip_enum_csv(capsys):
    code, out = run(capsys, "gossip-enum", "--n", "3", "--format", "csv")
    assert code == 0 and out.splitlines()[1] == "3,11,3,1,3,6,1"


def test_gossip_enum_all_zero(capsys):
    code, out = run(capsys, "gossip-enum", "--n", "5", "--all-zero-length")
    obj = json.loads(out)
    assert obj["all_zero_length"] == 6 and obj["count"] == 9152


def test_memory_budget_exit_3(capsys):
    code, out = run(capsys, "gossip-enum", "--n", "6", "--memory-budget", "10000")
    assert code == 3 and "error" in json.loads(out)


def test_pessimal_and_mismatch(capsys, monkeypatch):
    code, out = run(capsys, "pessimal", "--n", "4", "--exact", "--attempts", "100")
    obj = json.loads(out)
    assert code == 0 and obj["longest_chain"] == 6 and obj["length"] == 6
    monkeypatch.setattr(gb, "verify_pessimal", lambda calls, n=None: False)
    code, _ = run(capsys, "pessimal", "--n", "4")
    assert code == 2


def test_irredundant_build_w(capsys):
    code, out = run(capsys, "irredundant", "--n", "4", "--build-w")
    obj = json.loads(out)
    assert obj["max_length"] == 5 and obj["W_length"] == 10 and obj["W_irredundant"]


def test_fan_commands_n3(capsys, tmp_path):
    code, out = run(capsys, "spans", "--n", "3")
    assert json.loads(out)["spans"] == 7
    code, out = run(capsys, "orbits", "--n", "3")
    assert json.loads(out)["size_distribution"] == {"1": 1, "6": 1}
    code, out = run(capsys, "fvector", "--n", "3")
    assert json.loads(out)["f_vector"] == [9, 15, 7]
    target = tmp_path / "fan3.json"
    code, out = run(capsys, "fan", "--n", "3", "--emit", str(target))
    assert code == 0 and len(json.loads(target.read_text())["cones"]) == 7


def test_determinism_byte_identical(capsys):
    outs = [run(capsys, "closure-check", "--n", "3", "--trials", "200", "--seed", "5")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    outs = [run(capsys, "sl-check", "--n", "3", "--trials", "200", "--seed", "5")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    outs = [run(capsys, "pq-check", "--seed", "2")[1] for _ in range(2)]
    assert outs[0] == outs[1] and json.loads(outs[0])["ok"]


def test_group_commands(capsys, tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("0 9 2\n5 0 3\n2 3 0\n")
    code, out = run(capsys, "tdet", str(p))
    obj = json.loads(out)
    assert obj["value"] == "0" and obj["in_trop_sl"]
    code, out = run(capsys, "o3-check", "--matrix", str(p))
    assert json.loads(out)["classification"]["cone"] == "asymmetric"
    q = tmp_path / "o2.txt"
    q.write_text("0 3\n3 0\n")
    code, out = run(capsys, "o2-check", str(q))
    assert json.loads(out)["cone"] == "G2"


def test_realize(capsys, tmp_path):
    g = tmp_path / "g.json"
    g.write_text(single_detour_path(2, 5).dumps())
    code, out = run(capsys, "realize", str(g), "--format", "text")
    assert [line.split(",") for line in out.strip().splitlines()] == [["0", "11"], ["7", "0"]]
    code, out = run(capsys, "realize", str(g), "--transpose")
    assert json.loads(out)["matrix"]["entries"] == [["0", "7"], ["11", "0"]]


def test_bad_input_exit_1(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("0 1\n")
    assert cli.main(["kleene", str(p)]) == 1
    assert cli.main(["kleene", str(tmp_path / "missing.txt")]) == 1


def test_reproduce_quick(capsys):
    code, out = run(capsys, "reproduce-paper", "--quick", "--trials", "200")
    obj = json.loads(out)
    assert code == 0 and obj["all_pass"]
    assert all(c["pass"] for c in obj["checks"])


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "lossygossip.cli", "gossip-enum", "--n", "2"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["count"] == 2
