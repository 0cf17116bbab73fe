import json

from gcea.config import ConfigManager


def test_missing_file_gives_defaults(tmp_path):
    manager = ConfigManager(str(tmp_path / "none.json"))
    config = manager.load_config()
    assert config == manager.default_config
    config["runs"] = 3
    assert manager.default_config["runs"] == 50


def test_partial_file_is_filled(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"runs": 5, "note": "x"}), encoding="utf-8")
    config = ConfigManager(str(path)).load_config()
    assert config["runs"] == 5
    assert config["pop_size"] == 50
    assert config["note"] == "x"


def test_broken_file_falls_back(tmp_path, caplog):
    path = tmp_path / "config.json"
    path.write_text("{oops", encoding="utf-8")
    config = ConfigManager(str(path)).load_config()
    assert config["eval_budget"] == 100000
    assert "加载配置失败" in caplog.text


def test_non_object_falls_back(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("[1, 2]", encoding="utf-8")
    assert ConfigManager(str(path)).load_config()["alpha"] == 0.05



def test_binary_file_falls_back(tmp_path):
    path = tmp_path / "config.json"
    path.write_bytes(b"\xff\xfe{")
    assert ConfigManager(str(path)).load_config()["jobs"] == 1
