import json
from fractions import Fraction

import pytest

import logitstab as L
from logitstab.errors import InvalidParams, ParseError, SchemaError, TooManyPaths
from logitstab.zoo import (
    format_rational,
    game_from_dict,
    game_to_json,
    harmonic,
    lb_pos_jobs,
    parse_rational,
)


class TestParseRational:
    def test_accepts_fraction_and_integer_strings(self):
        assert parse_rational("3/4") == Fraction(3, 4)
        assert parse_rational("-2") == Fraction(-2)
        assert parse_rational(" 5/6 ") == Fraction(5, 6)
        assert parse_rational(7) == Fraction(7)

    @pytest.mark.parametrize("bad", ["0.5", "1e3", "a/b", "1/0", "", None, "1 / 2"])
    def test_rejects_non_rationals(self, bad):
        with pytest.raises(ParseError):
            parse_rational(bad)

    def test_roundtrip_with_format(self):
        for v in [Fraction(5, 6), Fraction(-3), Fraction(0), Fraction(13, 6)]:
            assert parse_rational(format_rational(v)) == v


def test_harmonic():
    assert harmonic(1) == 1
    assert harmonic(3) == Fraction(11, 6)


def test_lb_unit_instance_shape():
    game = L.make_lb_unit_instance(2, 2)
    assert game.n_players == 3  # l*m - 1 unit jobs
    assert game.n_states == 8
    game = L.make_lb_unit_instance(3, 2)
    assert game.n_players == 5
    assert game.n_states == 243


def test_lb_pos_jobs_multiset():
    jobs = lb_pos_jobs(2, 2)
    assert sorted(jobs) == sorted(
        [Fraction(1, 2), Fraction(1, 2)] + [Fraction(1, 6)] * 4
    )
    # general shape: two (D-d) jobs, (m-2) D jobs, l*m d jobs
    m, l = 4, 3
    jobs = lb_pos_jobs(m, l)
    big = Fraction(m, m + 1)
    small = big / (l * m)
    assert jobs.count(big - small) == 2
    assert jobs.count(big) == m - 2
    assert jobs.count(small) == l * m


def test_load_balancing_validation():
    with pytest.raises(InvalidParams):
        L.make_load_balancing(0, [1])
    with pytest.raises(InvalidParams):
        L.make_load_balancing(2, [])
    with pytest.raises(InvalidParams):
        L.make_load_balancing(2, [Fraction(-1)])


def test_parallel_links_validation():
    with pytest.raises(InvalidParams):
        L.make_parallel_links([Fraction(2), Fraction(1)], 2)  # decreasing
    with pytest.raises(InvalidParams):
        L.make_parallel_links([Fraction(0)], 2)
    with pytest.raises(InvalidParams):
        L.make_parallel_links([Fraction(1)], 0)


def test_parallel_links_costs():
    game = L.make_parallel_links([Fraction(1), Fraction(2)], 3)
    assert game.n_states == 8
    # everyone on the cheap link: cost 1; split 2/1 onto links: 1 + 2
    assert game.social_cost((0, 0, 0)) == 1
    assert game.social_cost((0, 0, 1)) == 3


def test_triangle_labels(triangle):
    assert triangle.n_players == 2
    assert all(len(row) == 2 for row in triangle.labels)


def test_network_design_shapley_shares():
    # two players share one edge of cost 2 to the terminal
    game = L.make_network_design(
        nodes=["s", "t"],
        edges=[("s", "t", Fraction(2))],
        player_sources=["s", "s"],
        terminal="t",
    )
    assert game.n_states == 1
    assert game.utility(0, (0,) * 2) == Fraction(-1)
    assert game.social_cost((0, 0)) == Fraction(2)


def test_network_design_path_cap():
    # ladder graph with many parallel routes exceeds a tiny cap
    nodes = ["a", "b", "c", "d", "t"]
    edges = []
    for u, v in [("a", "b"), ("b", "c"), ("c", "d"), ("d", "t")]:
        edges.append((u, v, Fraction(1)))
        edges.append((u, v, Fraction(1)))
    with pytest.raises(TooManyPaths):
        L.make_network_design(nodes, edges, ["a"], "t", path_cap=3)


def test_game_json_roundtrip(tmp_path):
    for game in [
        L.make_lb_unit_instance(2, 2),
        L.make_parallel_links([Fraction(1), Fraction(2)], 3),
        L.make_triangle(),
    ]:
        path = tmp_path / "game.json"
        path.write_text(json.dumps(game_to_json(game)))
        again = L.load_game_from_file(path)
        assert again.n_states == game.n_states
        for sid in range(game.n_states):
            prof = game.unpack(sid)
            assert again.social_cost(prof) == game.social_cost(prof)
            for i in range(game.n_players):
                assert again.utility(i, prof) == game.utility(i, prof)


def test_game_from_dict_schema_errors():
    with pytest.raises(SchemaError):
        game_from_dict({"no_type": True})
    with pytest.raises(SchemaError):
        game_from_dict({"type": "mystery"})
    with pytest.raises(SchemaError):
        game_from_dict({"type": "load_balancing", "machines": 2})  # jobs missing


def test_load_game_from_file_parse_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        L.load_game_from_file(path)


def test_normal_form_default_social_cost():
    game = L.make_normal_form([2], [[3], [5]])
    assert game.social_cost((0,)) == -3
    assert game.social_cost((1,)) == -5
