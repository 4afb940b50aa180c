"""
Reading and writing chain documents.
"""

import json
import logging
from typing import Dict, List, Tuple

from pydantic import ValidationError

from markov_compress.errors import DocumentError
from markov_compress.models.chain import (
    ROW_TOLERANCE,
    ChainSpec,
    TargetSpec,
    Value,
    coerce_numeric,
    ensure_valid,
    format_numeric,
    parse_numeric,
)
from markov_compress.models.schemas import ChainDocument

logger = logging.getLogger(__name__)


def _field(location: Tuple) -> str:
    return ".".join(str(part) for part in location)


def parse_document(text: str) -> ChainDocument:
    """Parse and schema-check a document without resolving labels.

    Raises:
        DocumentError: on a syntax or schema error
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(e.msg, line=e.lineno)
    try:
        return ChainDocument.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise DocumentError(first["msg"], field=_field(first["loc"]) or None)


def parse_chain(text: str, tolerance: float = ROW_TOLERANCE) -> Tuple[ChainSpec, TargetSpec]:
    """Parse a chain document into a validated chain and its targets.

    Raises:
        DocumentError: on syntax, schema or label errors
        InvalidChainError: if the chain or its targets are invalid
    """
    document = parse_document(text)
    mode = document.resolved_mode()
    index = {label: e for e, label in enumerate(document.states)}

    rows: List[Dict[int, Value]] = [{} for _ in document.states]
    for position, (source, destination, probability) in enumerate(document.transitions):
        for label in (source, destination):
            if label not in index:
                raise DocumentError(f"unknown label '{label}'", field=f"transitions.{position}")
        row = rows[index[source]]
        if index[destination] in row:
            raise DocumentError(f"duplicate transition {source} -> {destination}", field=f"transitions.{position}")
        value, _ = parse_numeric(probability)
        row[index[destination]] = coerce_numeric(value, mode)

    classes = []
    for name, members in document.targets.items():
        for label in members:
            if label not in index:
                raise DocumentError(f"unknown label '{label}'", field=f"targets.{name}")
        classes.append((name, [index[label] for label in members]))

    chain = ChainSpec.build(document.states, rows, mode)
    targets = TargetSpec.build(classes)
    ensure_valid(chain, targets, tolerance)
    logger.debug(f"Parsed chain with {chain.size} states, {chain.nnz} transitions, {len(targets)} target classes")
    return chain, targets


def serialize_chain(chain: ChainSpec, targets: TargetSpec) -> str:
    """Document text for a chain, with states and transitions in id order."""
    document = ChainDocument(
        states=list(chain.labels),
        targets={
            target.name: [chain.labels[e] for e in sorted(target.states)]
            for target in targets.classes
        },
        transitions=[
            (chain.labels[e], chain.labels[destination], format_numeric(value, chain.mode))
            for e, row in enumerate(chain.rows)
            for destination, value in row
        ],
        mode=chain.mode,
    )
    return document.model_dump_json(indent=2) + "\n"
