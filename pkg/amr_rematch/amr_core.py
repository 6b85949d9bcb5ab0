"""
AMR Core Module

Parses, validates and serializes AMR graphs in Penman notation, and loads
blank-line separated corpus files into typed entries.
"""

import logging
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import penman
from penman.exceptions import PenmanError as PenmanLibraryError
from penman.tree import Tree
from tqdm import tqdm

from amr_rematch.config import (
    DEFAULT_INVERT_NORMALIZE, DEFAULT_SERIALIZE_INDENT, INVERSE_ROLE_EXCEPTIONS
)
from amr_rematch.exceptions import (
    CorpusError, CyclicGraph, DisconnectedGraph, DuplicateEntryId, DuplicateVariableDefinition,
    EmptyGraph, GraphInvariantError, InvalidGraphStructure, MissingRoot, MultiEdge, PenmanError,
    PenmanSyntaxError, UnbalancedParens, UndefinedVariableReference, UnknownNodeReference
)

logger = logging.getLogger(__name__)

STRING = "string"
SYMBOL = "symbol"
NUMBER = "number"

NUMBER_RE = re.compile(r'^[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?$')
# Bare atoms shaped like this are variables; an undefined one is a dangling reference
VARIABLE_RE = re.compile(r'^[a-z]\d*$')
BLOCK_SEPARATOR_RE = re.compile(r'\n[ \t]*\n')
ESCAPE_RE = re.compile(r'\\(.)')


@dataclass(frozen=True, order=True)
class Constant:
    """Value at the end of an attribute edge, compared by kind and exact surface text."""

    kind: str
    lexical: str

    @classmethod
    def from_token(cls, token: str) -> "Constant":
        if len(token) >= 2 and token.startswith('"') and token.endswith('"'):
            return cls(STRING, ESCAPE_RE.sub(r'\1', token[1:-1]))
        if NUMBER_RE.match(token):
            return cls(NUMBER, token)
        return cls(SYMBOL, token)

    def to_token(self) -> str:
        if self.kind == STRING:
            escaped = self.lexical.replace('\\', '\\\\').replace('"', '\\"')
            return f'"{escaped}"'
        return self.lexical


Relation = Tuple[str, str, str]
Attribute = Tuple[str, str, Constant]


@dataclass(frozen=True)
class AmrGraph:
    """
    Rooted, directed, labeled AMR graph.

    Node ids are Penman variables. Role and attribute labels are stored
    without their leading colon.
    """

    root: str
    instances: Dict[str, str]
    relations: Tuple[Relation, ...] = ()
    attributes: Tuple[Attribute, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'instances', dict(self.instances))
        object.__setattr__(self, 'relations', tuple(tuple(r) for r in self.relations))
        object.__setattr__(self, 'attributes', tuple(tuple(a) for a in self.attributes))

    @property
    def nodes(self) -> List[str]:
        return list(self.instances)

    @property
    def edge_count(self) -> int:
        return len(self.relations) + len(self.attributes)

    def concept(self, node: str) -> str:
        return self.instances[node]

    def attribute_index(self) -> Dict[str, List[Tuple[str, Constant]]]:
        """Group attribute edges by their source node, in edge order."""
        index = defaultdict(list)
        for source, label, constant in self.attributes:
            index[source].append((label, constant))
        return index

    def with_edges(self, relations: Optional[Sequence[Relation]] = None,
                   attributes: Optional[Sequence[Attribute]] = None) -> "AmrGraph":
        return replace(
            self,
            relations=self.relations if relations is None else tuple(relations),
            attributes=self.attributes if attributes is None else tuple(attributes),
        )


@dataclass
class CorpusEntry:
    id: str
    graph: AmrGraph
    snt: Optional[str] = None
    metadata: Dict[str, str] = field(default_factory=dict)


def graph_size(g: AmrGraph) -> int:
    """Number of instances, attributes and relations."""
    return len(g.instances) + len(g.attributes) + len(g.relations)


def to_networkx(g: AmrGraph) -> nx.DiGraph:
    """
    Build a networkx view of the instance nodes and relation edges.

    Args:
        g: AMR graph

    Returns:
        DiGraph with a `concept` node attribute and a `role` edge attribute
    """
    dg = nx.DiGraph()
    dg.add_nodes_from((node, {'concept': concept}) for node, concept in g.instances.items())
    dg.add_edges_from((source, target, {'role': role}) for source, role, target in g.relations)
    return dg


def validate_graph(g: AmrGraph) -> None:
    """
    Check every AmrGraph invariant, raising on the first violation.

    Raises:
        MissingRoot, UnknownNodeReference, MultiEdge, CyclicGraph, DisconnectedGraph
    """
    if g.root not in g.instances:
        raise MissingRoot(f"root {g.root!r} is not an instance")
    for source, role, target in g.relations:
        for node in (source, target):
            if node not in g.instances:
                raise UnknownNodeReference(f"relation :{role} refers to unknown node {node!r}")
    for source, label, _ in g.attributes:
        if source not in g.instances:
            raise UnknownNodeReference(f"attribute :{label} refers to unknown node {source!r}")

    pairs = Counter((source, target) for source, _, target in g.relations)
    duplicated = [pair for pair, count in pairs.items() if count > 1]
    if duplicated:
        raise MultiEdge(f"more than one relation between {duplicated[0][0]!r} and {duplicated[0][1]!r}")
    attribute_counts = Counter(g.attributes)
    duplicated = [a for a, count in attribute_counts.items() if count > 1]
    if duplicated:
        source, label, constant = duplicated[0]
        raise MultiEdge(f"attribute :{label} {constant.to_token()} repeated on {source!r}")

    dg = to_networkx(g)
    if not nx.is_directed_acyclic_graph(dg):
        raise CyclicGraph("relation edges form a cycle")
    if not nx.is_weakly_connected(dg):
        raise DisconnectedGraph(f"{nx.number_weakly_connected_components(dg)} components")


def graph_equal(g1: AmrGraph, g2: AmrGraph) -> bool:
    """
    Structural equality that ignores variable names.

    Nodes must agree on concept, attribute multiset and root status; edges on role.
    """
    if (len(g1.instances), len(g1.relations), len(g1.attributes)) != \
            (len(g2.instances), len(g2.relations), len(g2.attributes)):
        return False
    return nx.is_isomorphic(
        _labelled_networkx(g1), _labelled_networkx(g2),
        node_match=lambda a, b: a['label'] == b['label'],
        edge_match=lambda a, b: a['role'] == b['role'],
    )


def _labelled_networkx(g: AmrGraph) -> nx.DiGraph:
    dg = to_networkx(g)
    attributes = g.attribute_index()
    for node in dg.nodes:
        dg.nodes[node]['label'] = (g.instances[node], tuple(sorted(attributes.get(node, []))), node == g.root)
    return dg


# Parsing

def _locate(text: str, offset: int) -> Tuple[int, int]:
    """Convert a character offset into 1-based (line, column)."""
    line = text.count('\n', 0, offset) + 1
    column = offset - (text.rfind('\n', 0, offset) + 1) + 1
    return line, column


def _scan_parens(text: str) -> int:
    """
    Check that the text holds exactly one balanced parenthesized expression.

    Comment lines before the graph are skipped; parentheses inside quoted
    strings are ignored.

    Returns:
        Offset of the opening parenthesis of the graph
    """
    stack: List[int] = []
    start = None
    closed_at = None
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == '"':
            end = i + 1
            while end < len(text) and text[end] != '"':
                end += 2 if text[end] == '\\' else 1
            if end >= len(text):
                raise PenmanSyntaxError("unterminated string", *_locate(text, i))
            i = end + 1
            continue
        if not stack and ch == '#':
            newline = text.find('\n', i)
            i = len(text) if newline < 0 else newline + 1
            continue
        if ch == '(':
            if closed_at is not None:
                raise PenmanSyntaxError("unexpected content after graph", *_locate(text, i))
            if start is None:
                start = i
            stack.append(i)
        elif ch == ')':
            if not stack:
                raise UnbalancedParens("unexpected ')'", *_locate(text, i))
            stack.pop()
            if not stack:
                closed_at = i
        elif not stack and not ch.isspace():
            where = "after" if closed_at is not None else "before"
            raise PenmanSyntaxError(f"unexpected content {where} graph", *_locate(text, i))
        i += 1
    if stack:
        raise UnbalancedParens("unclosed '('", *_locate(text, stack[-1]))
    if start is None:
        raise EmptyGraph("no graph found", *_locate(text, len(text)))
    return start


def _find(text: str, pattern: str, occurrence: int, default: int) -> Tuple[int, int]:
    matches = list(re.finditer(pattern, text))
    offset = matches[occurrence].start() if len(matches) > occurrence else default
    return _locate(text, offset)


def _iter_nodes(node: tuple) -> Iterator[tuple]:
    """Pre-order walk over the nested nodes of a penman tree."""
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        children = [target for role, target in current[1] if role != '/' and isinstance(target, tuple)]
        stack.extend(reversed(children))


def _is_inverse(role: str) -> bool:
    return role.endswith('-of') and role not in INVERSE_ROLE_EXCEPTIONS


def _parse_tree(text: str, invert_normalize: bool = DEFAULT_INVERT_NORMALIZE) -> Tuple[Tree, AmrGraph]:
    start = _scan_parens(text)
    try:
        tree = penman.parse(text)
    except PenmanLibraryError as exc:
        raise PenmanSyntaxError(
            getattr(exc, 'message', None) or str(exc),
            getattr(exc, 'lineno', None), getattr(exc, 'offset', None)
        ) from exc

    instances: Dict[str, str] = {}
    for var, branches in _iter_nodes(tree.node):
        if var in instances:
            pattern = r'\(\s*' + re.escape(var) + r'\s*/'
            raise DuplicateVariableDefinition(f"variable {var!r} is defined twice",
                                              *_find(text, pattern, 1, start))
        concepts = [target for role, target in branches if role == '/']
        if not concepts or not concepts[0]:
            raise PenmanSyntaxError(f"node {var!r} has no concept",
                                    *_find(text, r'\(\s*' + re.escape(var) + r'\b', 0, start))
        instances[var] = concepts[0]

    relations: List[Relation] = []
    attributes: List[Attribute] = []
    for var, branches in _iter_nodes(tree.node):
        for role, target in branches:
            if role == '/':
                continue
            if target is None:
                raise PenmanSyntaxError(f"role {role} on {var!r} has no target",
                                        *_find(text, re.escape(role), 0, start))
            target_var = target[0] if isinstance(target, tuple) else target
            if target_var in instances:
                if invert_normalize and _is_inverse(role):
                    relations.append((target_var, role[1:-3], var))
                else:
                    relations.append((var, role.lstrip(':'), target_var))
            elif VARIABLE_RE.match(target_var):
                raise UndefinedVariableReference(
                    f"{role} on {var!r} refers to undefined variable {target_var!r}",
                    *_find(text, re.escape(role) + r'\s+' + re.escape(target_var) + r'(?![^\s)])', 0, start))
            else:
                attributes.append((var, role.lstrip(':'), Constant.from_token(target_var)))

    graph = AmrGraph(root=tree.node[0], instances=instances,
                     relations=tuple(relations), attributes=tuple(attributes))
    try:
        validate_graph(graph)
    except GraphInvariantError as exc:
        raise InvalidGraphStructure(exc.message, exc.constraint, *_locate(text, start)) from exc
    return tree, graph


def parse_penman(text: str, invert_normalize: bool = DEFAULT_INVERT_NORMALIZE) -> AmrGraph:
    """
    Parse a single Penman graph.

    Args:
        text: One parenthesized Penman expression, optionally preceded by comment lines
        invert_normalize: Flip `-of` roles to their canonical direction

    Returns:
        Validated AmrGraph

    Raises:
        PenmanError subclass carrying line and column
    """
    return _parse_tree(text, invert_normalize)[1]


def parse_entry(text: str, index: int = 0,
                invert_normalize: bool = DEFAULT_INVERT_NORMALIZE) -> CorpusEntry:
    """
    Parse one corpus block, keeping its `# ::key value` metadata.

    Args:
        text: Penman block with optional metadata lines
        index: Position of the block, used to synthesize a missing id

    Returns:
        CorpusEntry
    """
    tree, graph = _parse_tree(text, invert_normalize)
    metadata = dict(tree.metadata)
    entry_id = metadata.pop('id', None) or f"doc-{index}"
    snt = metadata.pop('snt', None)
    return CorpusEntry(id=entry_id, graph=graph, snt=snt, metadata=metadata)


def _has_graph(block: str) -> bool:
    return any(line.strip() and not line.lstrip().startswith('#') for line in block.splitlines())


def load_corpus(path: str, on_error: str = "raise",
                invert_normalize: bool = DEFAULT_INVERT_NORMALIZE,
                show_progress: bool = True) -> List[CorpusEntry]:
    """
    Load a Penman corpus file.

    Args:
        path: UTF-8 file of blank-line separated Penman blocks
        on_error: "raise" to fail on the first bad block, "skip" to warn and continue
        invert_normalize: Flip `-of` roles to their canonical direction
        show_progress: Display a progress bar

    Returns:
        One CorpusEntry per graph block, in file order
    """
    if on_error not in ("raise", "skip"):
        raise ValueError(f"on_error must be 'raise' or 'skip', got {on_error!r}")

    with open(path, 'r', encoding='utf-8') as f:
        text = f.read().replace('\r\n', '\n')

    blocks = [block for block in BLOCK_SEPARATOR_RE.split(text) if block.strip()]
    entries: List[CorpusEntry] = []
    seen_ids = set()
    graph_index = 0
    for block_index, block in enumerate(tqdm(blocks, desc="Parsing AMR blocks", disable=not show_progress)):
        if not _has_graph(block):
            logger.debug(f"Skipping comment-only block {block_index} in {path}")
            continue
        try:
            entry = parse_entry(block, graph_index, invert_normalize)
            if entry.id in seen_ids:
                raise DuplicateEntryId(f"duplicate id {entry.id!r}")
        except (PenmanError, DuplicateEntryId) as exc:
            error = CorpusError(block_index, exc, path)
            if on_error == "raise":
                raise error from exc
            logger.warning(f"Skipping {error}")
            continue
        finally:
            graph_index += 1
        seen_ids.add(entry.id)
        entries.append(entry)

    if not entries:
        logger.warning(f"No AMR graphs found in {path}")
    else:
        logger.info(f"Loaded {len(entries)} AMR graphs from {path}")
    return entries


# Serialization

def _build_tree_node(g: AmrGraph) -> tuple:
    """Lay the graph out as a penman tree node, depth first from the root."""
    if g.root not in g.instances:
        raise MissingRoot(f"root {g.root!r} is not an instance")
    if not nx.is_weakly_connected(to_networkx(g)):
        raise DisconnectedGraph("graph cannot be laid out from its root")

    attributes = g.attribute_index()
    incident = defaultdict(list)
    for index, (source, role, target) in enumerate(g.relations):
        incident[source].append((f":{role}", g.instances[target], target, index))
        incident[target].append((f":{role}-of", g.instances[source], source, index))

    def branches_of(var: str) -> Iterator[tuple]:
        candidates = [(f":{label}", constant.to_token(), "", None) for label, constant in attributes.get(var, [])]
        candidates.extend(incident[var])
        return iter(sorted(candidates))

    visited = {g.root}
    emitted = set()
    root_node = (g.root, [('/', g.instances[g.root])])
    stack = [(root_node[1], branches_of(g.root))]
    while stack:
        branches, pending = stack[-1]
        for role, label, other, index in pending:
            if index is None:
                branches.append((role, label))
                continue
            if index in emitted:
                continue
            emitted.add(index)
            if other in visited:
                branches.append((role, other))
                continue
            visited.add(other)
            child = (other, [('/', g.instances[other])])
            branches.append((role, child))
            stack.append((child[1], branches_of(other)))
            break
        else:
            stack.pop()
    return root_node


def serialize_penman(g: AmrGraph, indent: Optional[int] = DEFAULT_SERIALIZE_INDENT,
                     metadata: Optional[Dict[str, str]] = None) -> str:
    """
    Serialize a graph to Penman text.

    Children are ordered by (role, target concept, target node id), so the
    output is deterministic for a given graph.

    Args:
        g: Graph satisfying the AmrGraph invariants
        indent: penman indentation (-1 adaptive, None for a single line)
        metadata: Optional `# ::key value` lines to emit before the graph

    Returns:
        Penman string

    Raises:
        DisconnectedGraph if some node cannot be reached from the root
    """
    tree = Tree(_build_tree_node(g), metadata=dict(metadata or {}))
    return penman.format(tree, indent=indent)


def format_entry(entry: CorpusEntry, indent: Optional[int] = DEFAULT_SERIALIZE_INDENT) -> str:
    metadata = {'id': entry.id}
    if entry.snt is not None:
        metadata['snt'] = entry.snt
    metadata.update(entry.metadata)
    return serialize_penman(entry.graph, indent=indent, metadata=metadata)


def write_corpus(entries: Sequence[CorpusEntry], path: str) -> None:
    """Write entries as a blank-line separated Penman corpus."""
    with open(path, 'w', encoding='utf-8') as f:
        f.write("\n\n".join(format_entry(entry) for entry in entries))
        f.write("\n")
    logger.info(f"Wrote {len(entries)} AMR graphs to {path}")
