"""Shared fixtures: the movie graph and the constraints, patterns and templates used with it."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict

import pytest

from gradb.models.elements import EntityEdgeKind
from gradb.models.graph import GradGraph
from gradb.schemas.algebra import JoinPredicate, MergeRule
from gradb.schemas.constraints import Assertion, Multiplicity, Range
from gradb.services.pattern_format import parse_pattern, parse_template

FIXTURES = Path(__file__).parent / "fixtures"

ASSOCIATION = EntityEdgeKind.ASSOCIATION
COMPOSITION = EntityEdgeKind.COMPOSITION


@dataclass
class MovieGraph:
    graph: GradGraph
    h: Dict[str, int] = field(default_factory=dict)


def build_movie_graph(rating: float = 8.5) -> MovieGraph:
    """Star Trek with its location, director, two actors and an audience rating"""
    g = GradGraph(strict=False)
    h: Dict[str, int] = {}
    h["v1"] = g.add_entity_node("MOVIE", {"IMDB_ID": 3884, "RT_ID": "Star_Trek"}).handle
    h["v2"] = g.add_entity_node("CITY", {"CityName": "UTAH"}).handle
    h["v3"] = g.add_entity_node("COUNTRY", {"CountryName": "USA"}).handle
    h["v4"] = g.add_entity_node("DIRECTOR", {"DirectorName": "J.J._Abrams"}).handle
    h["v5"] = g.add_entity_node("ACTOR", {"ActorName": "Eric_Bana"}).handle
    h["v6"] = g.add_entity_node("ACTOR", {"ActorName": "Chris_Pine"}).handle
    h["e12"] = g.add_entity_edge(h["v1"], h["v2"], ASSOCIATION, "FILMED IN").handle
    h["e14"] = g.add_entity_edge(h["v1"], h["v4"], ASSOCIATION, "DIRECTS").handle
    h["e15"] = g.add_entity_edge(h["v1"], h["v5"], ASSOCIATION, "ACTS", {"ranking": 1}).handle
    h["e16"] = g.add_entity_edge(h["v1"], h["v6"], ASSOCIATION, "ACTS").handle
    h["e23"] = g.add_entity_edge(h["v2"], h["v3"], COMPOSITION, "LOCATED IN").handle
    h["rating"] = g.add_attribute(h["v1"], "Rating").handle
    h["r85"] = g.add_literal(h["rating"], rating, {"Type": "Audience"}).handle
    h["e_rating"] = g.attribute_edge_of(h["rating"]).handle
    h["e_r85"] = g.literal_edge_of(h["r85"]).handle
    return MovieGraph(g, h)


MOVIE_DOCUMENT = (
    "grad/1 mode=lax records=15\n"
    "EN\t1\tACTOR\tActorName=s:Chris_Pine\n"
    "EN\t2\tACTOR\tActorName=s:Eric_Bana\n"
    "EN\t3\tCITY\tCityName=s:UTAH\n"
    "EN\t4\tCOUNTRY\tCountryName=s:USA\n"
    "EN\t5\tDIRECTOR\tDirectorName=s:J.J._Abrams\n"
    "EN\t6\tMOVIE\tIMDB_ID=i:3884;RT_ID=s:Star_Trek\n"
    "AN\t7\tRating\n"
    "LN\t8\tf:8.5\n"
    "EE\t9\t6\t1\tassociation\tACTS\t-\n"
    "EE\t10\t6\t2\tassociation\tACTS\tranking=i:1\n"
    "EE\t11\t6\t5\tassociation\tDIRECTS\t-\n"
    "EE\t12\t6\t3\tassociation\tFILMED%20IN\t-\n"
    "EE\t13\t3\t4\tcomposition\tLOCATED%20IN\t-\n"
    "AE\t14\t6\t7\n"
    "LE\t15\t7\t8\tType=s:Audience\n"
)

TOP_RATED_DIRECTED = """
nodes
  m entity = MOVIE
  d entity = DIRECTOR
  a entity = ACTOR
  r attribute = Rating
  v literal value > f:7
edges
  m d entity = DIRECTS
  m a entity = ACTS
  m r attribute
  r v literal attr.Type = s:Audience
"""

TOP_RATED_TOP_ACTOR = """
nodes
  m entity = MOVIE
  r attribute = Rating
  v literal value > f:7
  a entity = ACTOR
edges
  m r attribute
  r v literal
  m a entity = ACTS attr.ranking = i:1
"""

CO_ACTORS = """
nodes
  m entity = MOVIE
  a1 entity = ACTOR
  a2 entity = ACTOR
edges
  m a1 entity = ACTS
  m a2 entity = ACTS
"""

CO_ACTS_TEMPLATE = """
nodes
  x entity ACTOR ActorName=${a1.ActorName}
  y entity ACTOR ActorName=${a2.ActorName}
edges
  x y association Co-Acts
"""


@pytest.fixture
def movie() -> MovieGraph:
    return build_movie_graph()


@pytest.fixture
def movie_graph(movie) -> GradGraph:
    return movie.graph


@pytest.fixture
def two_movies() -> GradGraph:
    """The movie graph plus a second movie with the same two actors"""
    fixture = build_movie_graph()
    g = fixture.graph
    sequel = g.add_entity_node("MOVIE", {"IMDB_ID": 7812, "RT_ID": "Star_Trek_Into_Darkness"}).handle
    g.add_entity_edge(sequel, fixture.h["v5"], ASSOCIATION, "ACTS", {"ranking": 2})
    g.add_entity_edge(sequel, fixture.h["v6"], ASSOCIATION, "ACTS", {"ranking": 1})
    return g


@pytest.fixture
def directed_assertion() -> Assertion:
    """Every movie rated above 7 by some audience has a director"""
    return Assertion(name="TopRatedDirected", pattern=parse_pattern(TOP_RATED_DIRECTED), anchor_vars=["m"])


@pytest.fixture
def acts_multiplicity() -> Multiplicity:
    """Movies have at least one actor; actors play in any number of movies"""
    return Multiplicity(
        source_class="MOVIE",
        edge_label="ACTS",
        target_class="ACTOR",
        forward_range=Range(min=1),
        backward_range=Range(),
    )


@pytest.fixture
def top_actor_pattern():
    return parse_pattern(TOP_RATED_TOP_ACTOR)


@pytest.fixture
def co_actor_pattern():
    return parse_pattern(CO_ACTORS)


@pytest.fixture
def co_acts_template():
    return parse_template(CO_ACTS_TEMPLATE)


def rated_movie(label: str, value, context: Dict[str, str], identifiers=None) -> GradGraph:
    g = GradGraph(strict=False)
    movie = g.add_entity_node("MOVIE", identifiers or {"IMDB_ID": 3884})
    attribute = g.add_attribute(movie.handle, label)
    g.add_literal(attribute.handle, value, context)
    return g


@pytest.fixture
def audience_rated() -> GradGraph:
    return rated_movie("Rating", 8.5, {"Type": "Audience"}, {"IMDB_ID": 3884, "RT_ID": "Star_Trek"})


@pytest.fixture
def imdb_scored() -> GradGraph:
    return rated_movie("Score", 7.9, {"Source": "IMDB"})


@pytest.fixture
def critics_rated() -> GradGraph:
    return rated_movie("Rating", 7.2, {"Type": "Critics"})


@pytest.fixture
def movie_predicate() -> JoinPredicate:
    return JoinPredicate(rules=[MergeRule(class_label="MOVIE", match_on=["IMDB_ID"])])
