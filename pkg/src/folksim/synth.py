"""Seeded synthetic folksonomies with power-law tag usage and planted synonyms.

Each resource belongs to a topic and carries a few characteristic concepts
drawn from that topic. A concept is rendered as a tag; concepts in a synonym
group have several interchangeable tags, and every user consistently picks
one variant per group. Concept, resource and user popularity are Zipfian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from folksim.corpus import Folksonomy, from_triples
from folksim.errors import ConfigError


@dataclass(frozen=True)
class SynthSpec:
    n_users: int = 400
    n_resources: int = 3000
    n_tags: int = 6000
    n_bookmarks: int = 7000
    tag_popularity_exponent: float = 2.0
    tags_per_bookmark_mean: float = 2.5
    tags_per_bookmark_max: int = 8
    synonym_groups: int = 200
    synonym_size: int = 2
    variant_skew: float = 0.0
    n_topics: int = 20
    concepts_per_resource: tuple[int, int] = (3, 6)
    resource_popularity_exponent: float = 1.0
    noise_tag_prob: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("n_users", "n_resources", "n_tags", "n_bookmarks", "n_topics", "tags_per_bookmark_max"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.tag_popularity_exponent <= 1.0:
            raise ConfigError("tag_popularity_exponent must be > 1")
        if not 0.0 <= self.noise_tag_prob <= 1.0:
            raise ConfigError("noise_tag_prob must be in [0,1]")
        if self.resource_popularity_exponent < 0:
            raise ConfigError("resource_popularity_exponent must be >= 0")
        if self.variant_skew < 0:
            raise ConfigError("variant_skew must be >= 0")
        if self.synonym_size < 2:
            raise ConfigError("synonym_size must be >= 2")
        if self.synonym_groups < 0 or self.synonym_groups * self.synonym_size > self.n_tags:
            raise ConfigError("synonym groups do not fit in n_tags")
        if self.synonym_groups > self.n_tags / 2:
            raise ConfigError("synonym_groups must be <= n_tags / 2")
        if self.tags_per_bookmark_max > self.n_tags:
            raise ConfigError("tags_per_bookmark_max exceeds n_tags")
        if not 1.0 <= self.tags_per_bookmark_mean <= self.tags_per_bookmark_max:
            raise ConfigError("tags_per_bookmark_mean must be in [1, tags_per_bookmark_max]")
        lo, hi = self.concepts_per_resource
        if not 1 <= lo <= hi:
            raise ConfigError("concepts_per_resource must satisfy 1 <= lo <= hi")
        if self.n_bookmarks < self.n_resources:
            raise ConfigError("n_bookmarks must be >= n_resources (every resource is bookmarked)")

    @property
    def n_concepts(self) -> int:
        return self.n_tags - self.synonym_groups * (self.synonym_size - 1)


def synonym_preset(seed: int = 0) -> SynthSpec:
    """Many small topics whose concepts mostly come in four spellings.

    Users lean towards the first spelling of each group, so rarer variants
    only become findable through expansion.
    """
    return SynthSpec(
        n_users=300,
        n_resources=1000,
        n_tags=1500,
        n_bookmarks=3000,
        synonym_groups=300,
        synonym_size=4,
        variant_skew=1.0,
        n_topics=120,
        concepts_per_resource=(3, 5),
        tags_per_bookmark_mean=2.0,
        seed=seed,
    )


def _zipf_weights(rng: np.random.Generator, n: int, alpha: float) -> np.ndarray:
    ranks = rng.permutation(n) + 1.0
    w = ranks ** -alpha
    return w / w.sum()


def _sample_without_replacement(rng: np.random.Generator, items: np.ndarray, p: np.ndarray, m: int) -> np.ndarray:
    m = min(m, len(items))
    return rng.choice(items, size=m, replace=False, p=p / p.sum())


def generate_synthetic(spec: SynthSpec) -> Folksonomy:
    rng = np.random.default_rng(spec.seed)
    g, gs = spec.synonym_groups, spec.synonym_size
    n_concepts = spec.n_concepts
    # frequency exponent b maps to a Zipf rank exponent 1 / (b - 1)
    concept_w = _zipf_weights(rng, n_concepts, 1.0 / (spec.tag_popularity_exponent - 1.0))
    concept_topic = rng.integers(spec.n_topics, size=n_concepts)
    by_topic = [np.flatnonzero(concept_topic == k) for k in range(spec.n_topics)]

    resource_topic = rng.integers(spec.n_topics, size=spec.n_resources)
    lo, hi = spec.concepts_per_resource
    characteristic = []
    for r in range(spec.n_resources):
        pool = by_topic[resource_topic[r]]
        if len(pool) == 0:
            pool = np.arange(n_concepts)
        size = int(rng.integers(lo, hi + 1))
        characteristic.append(_sample_without_replacement(rng, pool, concept_w[pool], size))

    # variant v of a group is preferred with probability proportional to (v + 1) ** -skew
    variant_p = np.arange(1, gs + 1, dtype=float) ** -spec.variant_skew
    dialect = rng.choice(gs, size=(spec.n_users, max(g, 1)), p=variant_p / variant_p.sum())
    user_w = _zipf_weights(rng, spec.n_users, 1.0)
    resource_w = _zipf_weights(rng, spec.n_resources, spec.resource_popularity_exponent)

    resources = np.concatenate(
        [rng.permutation(spec.n_resources), rng.choice(spec.n_resources, size=spec.n_bookmarks - spec.n_resources, p=resource_w)]
    )
    users = rng.choice(spec.n_users, size=spec.n_bookmarks, p=user_w)
    extra = rng.poisson(spec.tags_per_bookmark_mean - 1.0, size=spec.n_bookmarks)
    noisy = rng.random(spec.n_bookmarks) < spec.noise_tag_prob
    noise_concept = rng.integers(n_concepts, size=spec.n_bookmarks)

    def tag_of(u: int, c: int) -> int:
        if c < g:
            return c * gs + int(dialect[u, c])
        return g * gs + (c - g)

    width = len(str(max(spec.n_tags, spec.n_users, spec.n_resources)))
    triples: list[tuple[str, str, str]] = []
    for u, r, e, nz, nc in zip(users, resources, extra, noisy, noise_concept):
        m = min(1 + int(e), spec.tags_per_bookmark_max)
        pool = characteristic[r]
        concepts = _sample_without_replacement(rng, pool, concept_w[pool], m)
        if nz and nc not in concepts:
            # off-topic tag, e.g. a personal or mistaken label
            concepts = np.append(concepts, nc)
        uid, rid = f"u{u:0{width}d}", f"r{r:0{width}d}"
        for c in concepts:
            triples.append((uid, rid, f"t{tag_of(int(u), int(c)):0{width}d}"))
    return from_triples(triples)
