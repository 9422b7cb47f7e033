import logging

import pytest

from gradb.core.exceptions import (
    CompositeContextValue,
    DuplicateEdgeLabelPair,
    DuplicateIdentity,
    DuplicateParentEdge,
    EmptyIdentifier,
    EmptyLabel,
    UnknownNode,
    UnsupportedElement,
)
from gradb.models.elements import EntityEdgeKind
from gradb.models.graph import GradGraph
from gradb.models.identity import entity_key, identity_key, literal_key
from gradb.services.constraints import check_entity_integrity, check_structure


class TestMovieGraph:
    def test_counts(self, movie_graph):
        assert movie_graph.counts() == {
            "entities": 6,
            "attributes": 1,
            "literals": 1,
            "entity_edges": 5,
            "attribute_edges": 1,
            "literal_edges": 1,
        }

    def test_rating_behind_literal_edge(self, movie):
        g, h = movie.graph, movie.h
        assert g.literal_value(h["rating"], h["e_r85"]) == 8.5
        assert g.literal_edge_of(h["r85"]).context == {"Type": "Audience"}

    def test_entity_integrity_holds(self, movie_graph):
        assert check_entity_integrity(movie_graph) == []

    def test_hypernode(self, movie):
        hypernode = movie.graph.hypernode_of(movie.h["v1"])
        assert len(hypernode) == 5
        assert movie.h["e_r85"] in hypernode
        assert movie.graph.hypernode_root(movie.h["r85"]) == movie.h["v1"]


class TestIdentityKeys:
    def test_strong_key(self, movie):
        key = identity_key(movie.graph, movie.h["v1"])
        assert str(key) == "<MOVIE,{IMDB_ID=3884,RT_ID=Star_Trek}>"

    def test_weak_key_includes_parent(self, movie):
        assert str(entity_key(movie.graph, movie.h["v2"])) == "<CITY,<COUNTRY,{CountryName=USA}>,{CityName=UTAH}>"

    def test_edge_and_attribute_keys(self, movie):
        g, h = movie.graph, movie.h
        assert str(identity_key(g, h["e14"])) == (
            "<DIRECTS,<MOVIE,{IMDB_ID=3884,RT_ID=Star_Trek}>,<DIRECTOR,{DirectorName=J.J._Abrams}>>"
        )
        assert str(identity_key(g, h["rating"])) == "<Rating,<MOVIE,{IMDB_ID=3884,RT_ID=Star_Trek}>>"

    def test_literals_have_only_a_local_key(self, movie):
        g, h = movie.graph, movie.h
        with pytest.raises(UnsupportedElement):
            identity_key(g, h["r85"])
        attribute, context = literal_key(g, h["r85"])
        assert attribute == identity_key(g, h["rating"])
        assert dict((name, canon[1]) for name, canon in context) == {"Type": "Audience"}

    def test_equal_numbers_share_identity(self):
        g = GradGraph(strict=False)
        a = g.add_entity_node("MOVIE", {"IMDB_ID": 3884})
        b = g.add_entity_node("MOVIE", {"IMDB_ID": 3884.0})
        assert entity_key(g, a.handle) == entity_key(g, b.handle)


class TestInsertion:
    def test_empty_label_and_identifiers(self):
        g = GradGraph()
        with pytest.raises(EmptyLabel):
            g.add_entity_node("", {"id": 1})
        with pytest.raises(EmptyIdentifier):
            g.add_entity_node("MOVIE", {})

    def test_second_parent_edge_rejected(self, movie):
        g, h = movie.graph, movie.h
        with pytest.raises(DuplicateParentEdge):
            g.add_entity_edge(h["v2"], h["v1"], EntityEdgeKind.COMPOSITION, "PART OF")

    def test_same_label_between_same_nodes_rejected(self, movie):
        g, h = movie.graph, movie.h
        with pytest.raises(DuplicateEdgeLabelPair):
            g.add_entity_edge(h["v1"], h["v4"], EntityEdgeKind.ASSOCIATION, "DIRECTS")

    def test_unknown_endpoint(self, movie_graph):
        with pytest.raises(UnknownNode):
            movie_graph.add_entity_edge(1, 999, EntityEdgeKind.ASSOCIATION, "X")

    def test_add_attribute_is_idempotent(self, movie):
        again = movie.graph.add_attribute(movie.h["v1"], "Rating")
        assert again.handle == movie.h["rating"]
        assert movie.graph.counts()["attributes"] == 1

    def test_composite_context_rejected(self, movie):
        with pytest.raises(CompositeContextValue):
            movie.graph.add_literal(movie.h["rating"], 7.0, {"Type": ("a", "b")})

    def test_duplicate_context_is_stored_and_logged(self, movie, caplog):
        with caplog.at_level(logging.WARNING):
            movie.graph.add_literal(movie.h["rating"], 9.0, {"Type": "Audience"})
        assert "DuplicateContext" in caplog.text
        assert len(movie.graph.literals_of(movie.h["rating"])) == 2

    def test_strict_mode_rejects_duplicate_identity(self):
        g = GradGraph(strict=True)
        g.add_entity_node("MOVIE", {"IMDB_ID": 3884})
        with pytest.raises(DuplicateIdentity):
            g.add_entity_node("MOVIE", {"IMDB_ID": 3884})

    def test_lax_mode_admits_duplicates(self):
        g = GradGraph(strict=False)
        g.add_entity_node("MOVIE", {"IMDB_ID": 3884})
        g.add_entity_node("MOVIE", {"IMDB_ID": 3884})
        assert [v.rule.value for v in check_entity_integrity(g)] == ["DuplicateEntityIdentity"]

    def test_strict_mode_checks_weak_keys(self):
        g = GradGraph(strict=True)
        usa = g.add_entity_node("COUNTRY", {"CountryName": "USA"})
        first = g.add_entity_node("CITY", {"CityName": "UTAH"})
        g.add_entity_edge(first.handle, usa.handle, EntityEdgeKind.COMPOSITION, "LOCATED IN")
        # a weak node's key is only known once its composition edge exists
        second = g.add_entity_node("CITY", {"CityName": "UTAH"})
        with pytest.raises(DuplicateIdentity):
            g.add_entity_edge(second.handle, usa.handle, EntityEdgeKind.COMPOSITION, "LOCATED IN")
        assert g.parent_of(second.handle) is None

    def test_find_entities(self, movie):
        found = movie.graph.find_entities("MOVIE", {"IMDB_ID": 3884.0})
        assert [node.handle for node in found] == [movie.h["v1"]]
        assert movie.graph.find_entities("ACTOR", {"ActorName": "Zoe"}) == []


class TestRemoval:
    def test_removing_a_country_cascades_to_its_cities(self, movie):
        g, h = movie.graph, movie.h
        assert g.remove_node(h["v3"]) == 4
        assert h["v2"] not in g
        assert h["e12"] not in g
        assert check_structure(g) == []

    def test_removing_an_attribute_takes_its_literals(self, movie):
        assert movie.graph.remove_node(movie.h["rating"]) == 4
        assert movie.graph.counts()["literals"] == 0

    def test_removing_a_literal(self, movie):
        assert movie.graph.remove_node(movie.h["r85"]) == 2
        assert movie.graph.literals_of(movie.h["rating"]) == []

    def test_removing_an_entity_takes_its_hypernode(self, movie):
        g, h = movie.graph, movie.h
        # MOVIE, 4 outgoing edges, Rating attribute and literal with their edges
        assert g.remove_node(h["v1"]) == 9
        assert g.counts()["entities"] == 5
        assert g.counts()["attributes"] == 0

    def test_edges_are_not_nodes(self, movie):
        with pytest.raises(UnsupportedElement):
            movie.graph.remove_node(movie.h["e14"])

    def test_remove_edge(self, movie):
        g, h = movie.graph, movie.h
        assert g.remove_edge(h["e14"]) == 1
        assert sorted(edge.label for edge in g.out_edges(h["v1"])) == ["ACTS", "ACTS", "FILMED IN"]
        with pytest.raises(UnsupportedElement):
            g.remove_edge(h["e_rating"])
        with pytest.raises(UnknownNode):
            g.remove_edge(h["e14"])


class TestCopy:
    def test_copy_keeps_keys_and_counts(self, movie_graph):
        clone = movie_graph.copy()
        assert clone.counts() == movie_graph.counts()
        keys = sorted(str(entity_key(movie_graph, h)) for h in movie_graph.entity_nodes)
        assert sorted(str(entity_key(clone, h)) for h in clone.entity_nodes) == keys

    def test_copy_is_independent(self, movie):
        clone = movie.graph.copy()
        clone.remove_node(next(iter(clone.class_members("MOVIE"))).handle)
        assert movie.graph.counts()["entities"] == 6
