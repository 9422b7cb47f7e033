import pytest

from gradb.core.exceptions import CapExceeded, InvalidPattern
from gradb.models.graph import GradGraph
from gradb.schemas.pattern import GraphPattern
from gradb.services.matcher import brute_force_match, match
from gradb.services.pattern_format import parse_pattern

from generators import random_graph, random_pattern


class TestMatch:
    def test_top_rated_movie_with_its_top_actor(self, movie, top_actor_pattern):
        result = match(movie.graph, top_actor_pattern)
        assert len(result) == 1
        bindings = result[0].bindings
        h = movie.h
        assert {var: bindings[var] for var in ("m", "r", "v", "a")} == {
            "m": h["v1"],
            "r": h["rating"],
            "v": h["r85"],
            "a": h["v5"],
        }
        assert bindings["m>a"] == h["e15"]
        assert bindings["r>v"] == h["e_r85"]

    def test_low_rating_does_not_match(self, top_actor_pattern):
        from conftest import build_movie_graph

        assert len(match(build_movie_graph(rating=7.0).graph, top_actor_pattern)) == 0

    def test_rows(self, movie, top_actor_pattern):
        header, row = match(movie.graph, top_actor_pattern).to_rows()
        assert header == ["m", "r", "v", "a", "m>r", "r>v", "m>a"]
        assert row[0] == "<MOVIE,{IMDB_ID=3884,RT_ID=Star_Trek}>"
        assert row[3] == "<ACTOR,{ActorName=Eric_Bana}>"

    def test_injective_and_ordered(self, movie, co_actor_pattern):
        result = match(movie.graph, co_actor_pattern)
        h = movie.h
        assert [(m.bindings["a1"], m.bindings["a2"]) for m in result] == [
            (h["v6"], h["v5"]),
            (h["v5"], h["v6"]),
        ]
        assert len(result.distinct()) == 1

    def test_limit_truncates(self, movie, co_actor_pattern):
        result = match(movie.graph, co_actor_pattern, limit=1)
        assert len(result) == 1
        assert result.truncated

    def test_limit_not_reached(self, movie, co_actor_pattern):
        assert not match(movie.graph, co_actor_pattern, limit=2).truncated

    def test_pinned_variable(self, movie, co_actor_pattern):
        result = match(movie.graph, co_actor_pattern, pinned={"a1": movie.h["v6"]})
        assert [m.bindings["a2"] for m in result] == [movie.h["v5"]]

    def test_literal_edge_context(self, movie_graph):
        audience = parse_pattern(
            "nodes\n  m entity\n  r attribute = Rating\n  v literal\n"
            "edges\n  m r attribute\n  r v literal attr.Type = s:Audience\n"
        )
        critics = parse_pattern(
            "nodes\n  m entity\n  r attribute = Rating\n  v literal\n"
            "edges\n  m r attribute\n  r v literal attr.Type = s:Critics\n"
        )
        assert len(match(movie_graph, audience)) == 1
        assert len(match(movie_graph, critics)) == 0

    def test_entity_edge_kind(self, movie_graph):
        pattern = parse_pattern("nodes\n  c entity\n  p entity\nedges\n  c p entity:composition\n")
        result = match(movie_graph, pattern)
        assert [m.rendered(["c"]) for m in result] == [["<CITY,<COUNTRY,{CountryName=USA}>,{CityName=UTAH}>"]]

    def test_incomparable_constant_is_unsatisfied(self, movie_graph):
        pattern = parse_pattern("nodes\n  m entity = MOVIE id.IMDB_ID > s:abc\n")
        assert len(match(movie_graph, pattern)) == 0

    def test_missing_identifier_is_unsatisfied(self, movie_graph):
        pattern = parse_pattern("nodes\n  m entity id.Budget != i:0\n")
        assert len(match(movie_graph, pattern)) == 0

    def test_empty_pattern_matches_once(self, movie_graph):
        result = match(movie_graph, GraphPattern())
        assert len(result) == 1
        assert result[0].bindings == {}

    def test_invalid_pattern_rejected(self, movie_graph):
        with pytest.raises(InvalidPattern):
            match(movie_graph, parse_pattern("nodes\n  v literal\n"))

    def test_subgraph(self, movie, top_actor_pattern):
        subgraph = match(movie.graph, top_actor_pattern)[0].subgraph
        assert subgraph.counts() == {
            "entities": 2,
            "attributes": 1,
            "literals": 1,
            "entity_edges": 1,
            "attribute_edges": 1,
            "literal_edges": 1,
        }


class TestBruteForceReference:
    @pytest.mark.parametrize("seed", range(100))
    def test_matches_agree(self, seed):
        graph = random_graph(seed)
        pattern = random_pattern(graph, seed)
        expected = brute_force_match(graph, pattern)
        actual = match(graph, pattern)
        assert [m.bindings for m in actual] == [m.bindings for m in expected]

    def test_pattern_node_cap(self, movie_graph):
        nodes = "".join(f"  e{i} entity\n" for i in range(9))
        with pytest.raises(CapExceeded):
            brute_force_match(movie_graph, parse_pattern("nodes\n" + nodes))

    def test_graph_node_cap(self):
        g = GradGraph()
        for index in range(70):
            g.add_entity_node("A", {"key": index})
        with pytest.raises(CapExceeded):
            brute_force_match(g, parse_pattern("nodes\n  x entity\n"))
