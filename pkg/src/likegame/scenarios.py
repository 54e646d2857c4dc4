"""Reference game instances used by the tests, the verify command and the docs."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from likegame.model import (
    ContentItem,
    GameConfig,
    InfoMode,
    PlayerSpec,
    PolicySpec,
)

QUADRANTS = ((0.6, 0.6), (-0.6, 0.6), (-0.6, -0.6), (0.6, -0.6))


def _clip(v) -> tuple[float, ...]:
    return tuple(float(min(1.0, max(-1.0, x))) for x in v)


def two_player(
    policy: str = "quid_pro_quo",
    gamma: float = 0.0,
    horizon: int = 2,
    allow_new_content: bool = False,
    pool_size: int = 1,
) -> GameConfig:
    """Two players with small pools around the origin, as in the basic reciprocation case."""
    ideals = {0: (0.2, 0.2), 1: (-0.2, -0.2)}
    offsets = ((0.0, 0.0), (0.3, -0.1), (-0.2, 0.4))
    players, pools = [], {}
    for pid, name in ((0, "i"), (1, "j")):
        players.append(PlayerSpec(pid, gamma, ideals[pid], PolicySpec(policy)))
        pools[pid] = tuple(
            ContentItem(f"c{name}{n}", _clip(np.add(ideals[pid], offsets[n])), pid)
            for n in range(pool_size)
        )
    return GameConfig(2, 2, horizon, tuple(players), pools, allow_new_content=allow_new_content)


def random_instance(
    seed: int,
    n_players: int,
    pool_size: int,
    horizon: int,
    gamma: float = 1.0,
    k_dims: int = 2,
    policy: str = "idealist",
) -> GameConfig:
    rng = np.random.default_rng(seed)
    players, pools = [], {}
    for pid in range(n_players):
        ideal = _clip(rng.uniform(-1, 1, k_dims))
        players.append(PlayerSpec(pid, gamma, ideal, PolicySpec(policy)))
        pools[pid] = tuple(
            ContentItem(f"p{pid}c{n}", _clip(rng.uniform(-1, 1, k_dims)), pid) for n in range(pool_size)
        )
    return GameConfig(n_players, k_dims, horizon, tuple(players), pools, rng_seed=seed)


def salient_type(
    seed: int = 2024,
    n_players: int = 20,
    horizon: int = 10,
    info_mode: InfoMode = InfoMode.IMPERFECT,
    visibility_floor: float = 0.05,
    policies: Optional[Sequence[str]] = None,
    salient_item_rate: float = 0.5,
) -> GameConfig:
    """All engagement-seeking players, four content types, type 0 salient.

    Ideals are spread evenly over the four types. Every pool holds one item
    near the owner's ideal and one near a random centroid; a third item sits
    near the salient centroid with probability ``salient_item_rate`` and
    near another random centroid otherwise. By default every player is a
    level-1 reasoner, so r=0 shares lean salient once cheap talk has run.
    """
    rng = np.random.default_rng(seed)
    if policies is None:
        policies = ["level_k"] * n_players
    players, pools = [], {}
    for pid in range(n_players):
        centre = QUADRANTS[pid % 4]
        ideal = _clip(np.add(centre, rng.normal(0, 0.15, 2)))
        name = policies[pid]
        params = {"depth": 1} if name == "level_k" else {}
        players.append(PlayerSpec(pid, 0.0, ideal, PolicySpec(name, params)))
        other = QUADRANTS[int(rng.integers(4))]
        third = QUADRANTS[0] if rng.random() < salient_item_rate else QUADRANTS[int(rng.integers(4))]
        anchors = (ideal, other, third)
        pools[pid] = tuple(
            ContentItem(f"c{pid:02d}_{n}", _clip(np.add(a, rng.normal(0, 0.15, 2))), pid)
            for n, a in enumerate(anchors)
        )
    return GameConfig(
        n_players,
        2,
        horizon,
        tuple(players),
        pools,
        info_mode=info_mode,
        visibility_floor=visibility_floor,
        cheap_talk=True,
        type_centroids=QUADRANTS,
        salient_type=0,
        rng_seed=seed,
    )


BOOST_TARGET = "seek_0"


def influencer(
    multiplier: float = 10.0,
    seed: int = 0,
    n_audience: int = 25,
    horizon: int = 8,
    visibility_floor: float = 0.2,
) -> GameConfig:
    """Signal boosting: a seeker shares an item tailored to an influencer.

    Player 0 seeks, player 1 reposts items within 0.3 of its ideal and carries
    ``multiplier`` as audience weight, players 2.. are like-only reactors with
    ideals on a ring 0.4 to 0.8 away from the influencer. The seeker's
    tailored item is ``BOOST_TARGET``.
    """
    rng = np.random.default_rng(seed)
    star = (0.5, 0.5)
    players = [
        PlayerSpec(0, 0.0, (-0.5, 0.2), PolicySpec("influencer_seeker", {"target": 1})),
        PlayerSpec(1, 0.0, star, PolicySpec("influencer_reposter", {"radius": 0.3}), audience_multiplier=float(multiplier)),
    ]
    pools = {
        0: (
            ContentItem(BOOST_TARGET, (0.36, 0.64), 0),
            ContentItem("seek_1", (-0.5, 0.25), 0),
        ),
        1: (ContentItem("star_0", (0.52, 0.47), 1),),
    }
    for pid in range(2, n_audience + 2):
        angle = rng.uniform(0, 2 * np.pi)
        radius = rng.uniform(0.4, 0.8)
        ideal = _clip(np.add(star, (radius * np.cos(angle), radius * np.sin(angle))))
        players.append(PlayerSpec(pid, 0.0, ideal, PolicySpec("reactor", {"radius": 1.0})))
        pools[pid] = (ContentItem(f"fan{pid:02d}", _clip(np.add(ideal, rng.normal(0, 0.05, 2))), pid),)
    return GameConfig(
        len(players),
        2,
        horizon,
        tuple(players),
        pools,
        info_mode=InfoMode.IMPERFECT,
        visibility_floor=visibility_floor,
        rng_seed=seed,
    )


def dominance_instance(blind: bool = False):
    """Focal gamma=0 player facing two reactors whose taste sits far from the focal ideal.

    Returns ``(config, menus)``. The focal player (0) chooses between sharing
    the item near the opponents' taste (``f_major``) and the item near its
    own ideal (``f_own``), then stays silent. Each opponent either likes
    close content, likes whatever comes first, or stays silent. With
    ``blind`` the taste-driven reactor is dropped from the opponent menus.
    """
    players = (
        PlayerSpec(0, 0.0, (1.0, 1.0), PolicySpec("noop")),
        PlayerSpec(1, 0.0, (-0.8, -0.8), PolicySpec("noop")),
        PlayerSpec(2, 0.0, (-0.85, -0.75), PolicySpec("noop")),
    )
    pools = {
        0: (ContentItem("f_major", (-0.9, -0.9), 0), ContentItem("f_own", (0.9, 0.9), 0)),
        1: (ContentItem("o1", (-0.2, -0.9), 1),),
        2: (ContentItem("o2", (-0.9, -0.2), 2),),
    }
    config = GameConfig(3, 2, 2, players, pools)
    silent = [{"kind": "noop", "content": None, "source": None}] * 2
    focal = [
        PolicySpec("open_loop", {"actions": ({"kind": "share", "content": cid, "source": None}, *silent)})
        for cid in ("f_major", "f_own")
    ]
    reactions = [PolicySpec("reactor", {"radius": None}), PolicySpec("noop")]
    if not blind:
        reactions.insert(0, PolicySpec("reactor", {"radius": 0.5}))
    return config, [focal, list(reactions), list(reactions)]
