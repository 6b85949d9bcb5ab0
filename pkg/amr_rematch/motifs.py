"""
Motif Extraction Module

Builds the attribute, instance and relation motifs of an AMR graph, with
optional PropBank frame generalization, and the canonical motif sets that
rematch compares.
"""

import logging
import os
import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Union

from amr_rematch.amr_core import NUMBER, STRING, SYMBOL, AmrGraph, Constant
from amr_rematch.config import DEFAULT_MOTIF_KINDS, MOTIF_KINDS
from amr_rematch.exceptions import MalformedRow, UnknownEdge, UnknownNode

logger = logging.getLogger(__name__)

ATTRIBUTE, INSTANCE, RELATION = MOTIF_KINDS
KIND_ALIASES = {
    'a': ATTRIBUTE, 'attribute': ATTRIBUTE,
    'i': INSTANCE, 'instance': INSTANCE,
    'r': RELATION, 'relation': RELATION,
}

PROPBANK_FRAME_RE = re.compile(r'^.+-\d{2,}$')
FRAME_MAP_HEADER = ("propbank_frame", "generalized_frame")
_DELIMITER_RE = re.compile(r'([\\(),])')
_CONSTANT_TAGS = {STRING: 's', SYMBOL: 'y', NUMBER: 'n'}


def _escape(text: str) -> str:
    return _DELIMITER_RE.sub(r'\\\1', text)


def tagged_constant(constant: Constant) -> str:
    """Render a constant with its kind tag, e.g. `s:Helen`, `y:-`, `n:3`."""
    return f"{_CONSTANT_TAGS[constant.kind]}:{_escape(constant.lexical)}"


@dataclass(frozen=True)
class AttributeMotif:
    label: str
    value: Constant

    def canonical(self) -> str:
        return f"A({_escape(self.label)},{tagged_constant(self.value)})"


@dataclass(frozen=True)
class InstanceMotif:
    concept: str
    attribute: Optional[AttributeMotif] = None

    def canonical(self) -> str:
        if self.attribute is None:
            return f"I({_escape(self.concept)})"
        return f"I({_escape(self.concept)},{self.attribute.canonical()})"


@dataclass(frozen=True)
class RelationMotif:
    source: InstanceMotif
    role: str
    target: InstanceMotif

    def canonical(self) -> str:
        return f"R({self.source.canonical()},{_escape(self.role)},{self.target.canonical()})"


Motif = Union[AttributeMotif, InstanceMotif, RelationMotif]
MotifSet = FrozenSet[str]


def canonical_string(motif: Motif) -> str:
    """Delimiter-escaped, kind-tagged rendering; distinct motifs never share a string."""
    return motif.canonical()


@dataclass(frozen=True)
class FrameMap:
    """PropBank frame -> generalized frame lookup; unmapped frames map to themselves."""

    entries: Dict[str, str] = field(default_factory=dict)

    def lookup(self, frame: str) -> str:
        return self.entries.get(frame, frame)

    __getitem__ = lookup

    def generalize(self, concept: str) -> str:
        """Substitute only concepts shaped like PropBank frames (`lemma-NN`)."""
        if PROPBANK_FRAME_RE.match(concept):
            return self.entries.get(concept, concept)
        return concept

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, frame: str) -> bool:
        return frame in self.entries


def load_frame_map(path: Optional[str]) -> FrameMap:
    """
    Load a frame generalization table.

    Args:
        path: TSV file with `propbank_frame<TAB>generalized_frame` rows; blank
            lines, `#` comments and a header row are skipped

    Returns:
        FrameMap (identity map when path is None or missing)

    Raises:
        MalformedRow with the 1-based line number
    """
    if path is None:
        return FrameMap()
    if not os.path.exists(path):
        logger.warning(f"Frame map {path} not found, keeping original PropBank frames")
        return FrameMap()

    entries = {}
    with open(path, 'r', encoding='utf-8') as f:
        for line_no, line in enumerate(f, 1):
            row = line.rstrip('\r\n')
            if not row.strip() or row.lstrip().startswith('#'):
                continue
            columns = [column.strip() for column in row.split('\t')]
            if len(columns) != 2 or not all(columns):
                raise MalformedRow(line_no, row)
            if tuple(columns) == FRAME_MAP_HEADER:
                continue
            entries[columns[0]] = columns[1]

    logger.info(f"Loaded {len(entries)} frame mappings from {path}")
    return FrameMap(entries)


def parse_kinds(spec: Union[str, Iterable[str]]) -> FrozenSet[str]:
    """
    Parse a motif kind selection such as "a,i,r" or ["attribute", "relation"].

    Raises:
        ValueError on an unknown kind
    """
    tokens = spec.split(',') if isinstance(spec, str) else list(spec)
    kinds = set()
    for token in tokens:
        token = token.strip().lower()
        if not token:
            continue
        if token not in KIND_ALIASES:
            raise ValueError(f"unknown motif kind {token!r} (use a, i, r)")
        kinds.add(KIND_ALIASES[token])
    return frozenset(kinds)


def _check_node(g: AmrGraph, node: str) -> None:
    if node not in g.instances:
        raise UnknownNode(node)


def _build_instance_motifs(concept: str, attributes: List[AttributeMotif], frames: Optional[FrameMap],
                           with_attributes: bool) -> FrozenSet[InstanceMotif]:
    if frames is not None:
        concept = frames.generalize(concept)
    if not with_attributes or not attributes:
        return frozenset({InstanceMotif(concept)})
    return frozenset(InstanceMotif(concept, attribute) for attribute in attributes)


def attribute_motifs(g: AmrGraph, node: str) -> FrozenSet[AttributeMotif]:
    """One attribute motif per attribute edge leaving `node`."""
    _check_node(g, node)
    return frozenset(AttributeMotif(label, constant) for source, label, constant in g.attributes if source == node)


def instance_motifs(g: AmrGraph, node: str, frames: Optional[FrameMap] = None,
                    with_attributes: bool = True) -> FrozenSet[InstanceMotif]:
    """
    Instance motifs of a node.

    A node without attributes yields its (generalized) concept alone; a node
    with attributes yields one motif per attribute and no bare concept motif.
    """
    _check_node(g, node)
    return _build_instance_motifs(g.instances[node], list(attribute_motifs(g, node)), frames, with_attributes)


def relation_motifs(g: AmrGraph, edge: int, frames: Optional[FrameMap] = None,
                    with_attributes: bool = True) -> FrozenSet[RelationMotif]:
    """Every combination of source and target instance motifs around one relation."""
    if not 0 <= edge < len(g.relations):
        raise UnknownEdge(edge)
    source, role, target = g.relations[edge]
    sources = instance_motifs(g, source, frames, with_attributes)
    targets = instance_motifs(g, target, frames, with_attributes)
    return frozenset(RelationMotif(s, role, t) for s in sources for t in targets)


def iter_motifs(g: AmrGraph, frames: Optional[FrameMap] = None,
                enabled: Iterable[str] = DEFAULT_MOTIF_KINDS) -> Iterator[Motif]:
    """
    Yield the motifs of every enabled kind; duplicates are possible.

    Disabling the attribute kind also strips attributes out of instance
    motifs, so no attribute information reaches the feature set.
    """
    enabled = frozenset(enabled)
    if not enabled:
        return
    with_attributes = ATTRIBUTE in enabled
    index = g.attribute_index()
    node_attributes = {
        node: [AttributeMotif(label, constant) for label, constant in index.get(node, [])]
        for node in g.instances
    }
    if ATTRIBUTE in enabled:
        for attributes in node_attributes.values():
            yield from attributes
    if INSTANCE not in enabled and RELATION not in enabled:
        return

    node_instances = {
        node: _build_instance_motifs(concept, node_attributes[node], frames, with_attributes)
        for node, concept in g.instances.items()
    }
    if INSTANCE in enabled:
        for motifs in node_instances.values():
            yield from motifs
    if RELATION in enabled:
        for source, role, target in g.relations:
            for s in node_instances[source]:
                for t in node_instances[target]:
                    yield RelationMotif(s, role, t)


def motif_set(g: AmrGraph, frames: Optional[FrameMap] = None,
              enabled: Iterable[str] = DEFAULT_MOTIF_KINDS) -> MotifSet:
    """
    Canonical motif set of a graph.

    Args:
        g: AMR graph
        frames: Optional frame generalization map
        enabled: Motif kinds to include

    Returns:
        Frozen set of canonical motif strings
    """
    return frozenset(canonical_string(motif) for motif in iter_motifs(g, frames, enabled))


def label_set(g: AmrGraph) -> FrozenSet[str]:
    """
    All labels of a graph, tagged by what they label.

    Concepts, roles, attribute labels and constants live in separate
    namespaces, so the concept `name` and the role `name` stay distinct.
    """
    labels = {f"concept:{concept}" for concept in g.instances.values()}
    labels.update(f"role:{role}" for _, role, _ in g.relations)
    for _, label, constant in g.attributes:
        labels.add(f"attribute:{label}")
        labels.add(f"constant:{tagged_constant(constant)}")
    return frozenset(labels)
