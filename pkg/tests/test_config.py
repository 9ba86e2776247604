from fractions import Fraction

import pytest

from finrestrict.config import (
    ConfigError,
    RunConfig,
    load_config,
    parse_items,
    parse_polynomial,
    read_config_text,
)


def labels(cfg):
    specs, skipped = cfg.group_specs()
    return [s.label for s in specs], skipped


def test_defaults():
    cfg = RunConfig()
    assert cfg.n == (2,) and cfg.alpha == (1,) and cfg.seed == 0
    assert cfg.a is None and cfg.b is None and cfg.measure == "paraboloid"
    assert cfg.size_cap == 2**20 and cfg.exhaustive_cap == 16


def test_read_config_text():
    text = """
    # grid
    p = 3, 5
    alpha = 1-2   # range
    q = 3
    seed=42
    """
    items = read_config_text(text)
    assert items == {"p": "3, 5", "alpha": "1-2", "q": "3", "seed": "42"}
    with pytest.raises(ConfigError):
        read_config_text("p 3")


def test_grid_order_and_dedup():
    cfg = parse_items({"groups": "Z/6^1; F_3^2", "p": "3,5", "alpha": "1-2", "n": "2", "N": "9", "q": "3"})
    got, skipped = labels(cfg)
    # explicit groups first, then N values, then p^alpha with p outermost; duplicates dropped
    assert got == ["Z/6^1", "F_3^2", "Z/9^2", "Z/3^2", "Z/5^2", "Z/25^2"]
    assert skipped == []


def test_size_cap_skips():
    cfg = parse_items({"p": "7", "alpha": "1-3", "n": "2,3", "q": "7"})
    got, skipped = labels(cfg)
    assert "F_7^3" in got and "Z/343^2" in got
    assert skipped == ["Z/343^3"]


def test_extension_field_polynomials():
    cfg = parse_items({"q": "9", "poly_9": "1,0,1"})
    assert labels(cfg)[0] == ["F_9^2"]
    with pytest.raises(ConfigError, match="poly_9"):
        parse_items({"q": "9"}).group_specs()
    with pytest.raises(ConfigError):
        parse_items({"q": "9", "poly_9": "1,0,0,1"})
    assert labels(parse_items({"groups": "F_9^2:1,0,1"}))[0] == ["F_9^2"]


@pytest.mark.parametrize(
    "items,msg",
    [
        ({"p": "4"}, "p must be an odd prime, got 4"),
        ({"p": "2"}, "odd prime"),
        ({"alpha": "0"}, "alpha"),
        ({"q": "8"}, "odd prime"),
        ({"q": "6"}, "odd prime"),
        ({"measure": "sphere"}, "measure"),
        ({"measure": "graph"}, "polynomial"),
        ({"measure": "weights"}, "weights_file"),
        ({"format": "xml"}, "format"),
        ({"a": "1", "b": "3/2"}, "b <= a"),
        ({"seed": "x"}, "seed"),
        ({"colour": "red"}, "unknown config key"),
        ({"groups": "Q/3^2"}, "cannot parse group"),
        ({"groups": "F_6^2"}, "prime power"),
    ],
)
def test_validation_errors(items, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_items(items).group_specs()


def test_flags_override_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("p = 3\nseed = 1\nsamples = 50\na = 1/2\n")
    cfg = load_config(path, {"seed": "7"})
    assert cfg.seed == 7 and cfg.samples == 50 and cfg.a == Fraction(1, 2)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.cfg")


def test_canonical_and_digest():
    a = parse_items({"p": "3", "a": "1"})
    b = parse_items({"a": "1", "p": "3"})
    assert a.digest() == b.digest()
    assert a.digest() != parse_items({"p": "5", "a": "1"}).digest()
    assert a.canonical()["a"] == "1"


def test_parse_polynomial():
    assert parse_polynomial("w1^2 + 2*w2^2", 2) == {(2, 0): 1, (0, 2): 2}
    assert parse_polynomial("3 w1 w2 + w2^3 + 2", 2) == {(1, 1): 3, (0, 3): 1, (0, 0): 2}
    assert parse_polynomial("w1 + w1", 1) == {(1,): 2}
    with pytest.raises(ConfigError):
        parse_polynomial("w3^2", 2)
    with pytest.raises(ConfigError):
        parse_polynomial("w1 +", 2)
    with pytest.raises(ConfigError):
        parse_polynomial("x^2", 2)
