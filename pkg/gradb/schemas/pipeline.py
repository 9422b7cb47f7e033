from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from gradb.core.config import settings
from gradb.core.exceptions import MissingInput


class Verb(str, Enum):
    LOAD = "load"
    VALIDATE = "validate"
    MATCH = "match"
    SELECT = "select"
    COMPOSE = "compose"
    UNION = "union"
    DIFF = "diff"
    JOIN = "join"
    PRODUCT = "product"
    STATS = "stats"
    EXPORT = "export"


# Positional inputs each verb requires, and how many more it may take
REQUIRED_INPUTS = {
    Verb.LOAD: 0,
    Verb.VALIDATE: 1,
    Verb.MATCH: 2,
    Verb.SELECT: 2,
    Verb.COMPOSE: 3,
    Verb.UNION: 2,
    Verb.DIFF: 2,
    Verb.JOIN: 3,
    Verb.PRODUCT: 2,
    Verb.STATS: 1,
    Verb.EXPORT: 1,
}
OPTIONAL_INPUTS = {Verb.LOAD: None, Verb.VALIDATE: 1}


class PipelineConfig(BaseModel):
    """One CLI invocation: a verb, its input files and the mode flags"""

    verb: Verb
    inputs: List[Path] = Field(default_factory=list)
    out: Optional[Path] = None
    property_graph: Optional[Path] = None
    strict: bool = False
    merge: bool = False
    max_matches: int = Field(default_factory=lambda: settings.MAX_MATCHES, ge=1)
    global_edge_labels: bool = False
    delimiter: Optional[str] = None

    @model_validator(mode="after")
    def check_arity(self) -> "PipelineConfig":
        required = REQUIRED_INPUTS[self.verb]
        extra = OPTIONAL_INPUTS.get(self.verb, 0)
        if len(self.inputs) < required:
            raise ValueError(f"{self.verb.value} needs {required} input file(s), got {len(self.inputs)}")
        if extra is not None and len(self.inputs) > required + extra:
            raise ValueError(f"{self.verb.value} takes at most {required + extra} input file(s), got {len(self.inputs)}")
        if self.verb is Verb.LOAD and not self.inputs and self.property_graph is None:
            raise ValueError("load needs a mapping file or --property-graph")
        if self.property_graph is not None and (self.verb is not Verb.LOAD or self.inputs):
            raise ValueError("--property-graph replaces the mapping and tables of load")
        return self

    def check_inputs(self) -> None:
        """Every referenced input must be an existing regular file at dispatch"""
        for path in self.inputs + ([self.property_graph] if self.property_graph else []):
            if not path.exists():
                raise MissingInput(f"no such file: {path}")
            if not path.is_file():
                raise MissingInput(f"not a regular file: {path}")
