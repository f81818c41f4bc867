"""Default table of the 35 action categories.

Pattern lists and critical/complementary muscle partitions are illustrative
defaults, not canonical: they are plausible hand-written guesses documented
here so users can replace them via the library file.
"""

from __future__ import annotations

from .motions import ActionSpec, ObjectProtocol

__all__ = ["DEFAULT_ACTIONS", "default_actions", "ACTION_NAMES"]

_L_ARM = ("left_upper_arm", "left_forearm", "left_hand")
_R_ARM = ("right_upper_arm", "right_forearm", "right_hand")
_ARMS = _L_ARM + _R_ARM
_L_LEG = ("left_thigh", "left_calf", "left_foot")
_R_LEG = ("right_thigh", "right_calf", "right_foot")
_LEGS = _L_LEG + _R_LEG
_CORE = ("pelvis", "spine")


def _dyn(object_kind: str, attach: str, timed: bool = False) -> ObjectProtocol:
    return ObjectProtocol("dynamic", object_kind, attach, timed)


def _fix(object_kind: str) -> ObjectProtocol:
    return ObjectProtocol("static", object_kind)


def default_actions() -> tuple[ActionSpec, ...]:
    sub = [
        ("brush hair", ["brush.*hair", "comb"], _R_ARM + ("head",), _dyn("hairbrush", "right_hand")),
        ("catch", ["catch"], _ARMS, _dyn("ball", "right_hand")),
        ("clap", ["clap"], _ARMS, None),
        ("climb stairs", ["climb", "stairs"], _LEGS + _CORE, _fix("stairs")),
        ("golf", ["golf"], _ARMS + ("spine",), _dyn("golf club", "right_hand")),
        ("jump", ["jump", "leap"], _LEGS + ("pelvis",), None),
        ("kick ball", ["kick"], _R_LEG + ("pelvis",), _dyn("ball", "right_foot")),
        ("push", ["push"], _ARMS + ("spine",), None),
        ("pick", ["pick"], _R_ARM + ("spine",), _dyn("box", "right_hand")),
        ("pour", ["pour"], _R_ARM, _dyn("pitcher", "right_hand")),
        ("pull up", ["pull.?up", "chin.?up"], _ARMS + _CORE, _fix("bar")),
        ("run", ["run", "jog"], _LEGS + ("pelvis",), None),
        ("shoot ball", ["shoot.*ball", "basketball"], _ARMS, _dyn("ball", "right_hand")),
        ("shoot bow", ["bow", "archer"], _ARMS + ("spine",), _dyn("bow", "left_hand")),
        ("shoot gun", ["gun", "pistol"], _R_ARM + ("head",), _dyn("gun", "right_hand")),
        ("sit", ["sit"], _LEGS + _CORE, _fix("bench")),
        ("stand", ["stand"], _LEGS + _CORE, None),
        ("swing baseball", ["baseball", "swing.*bat"], _ARMS + ("spine",), _dyn("bat", "right_hand")),
        ("throw", ["throw"], _R_ARM + ("spine",), _dyn("ball", "right_hand")),
        ("walk", ["walk"], _LEGS + ("pelvis",), None),
        ("wave", ["wave"], _R_ARM, None),
    ]
    one = [
        ("car hit", ["car.*hit", "hit.*car", "collision"], _CORE + ("head",), _dyn("car", "pelvis", timed=True)),
        ("crawl", ["crawl"], _LEGS + ("pelvis", "left_upper_arm", "left_forearm", "right_upper_arm", "right_forearm"), None),
        ("dive floor", ["dive"], _ARMS + _CORE, None),
        ("flee", ["flee", "sprint", "run.*away"], _LEGS + ("pelvis",), None),
        ("hop", ["hop"], _LEGS + ("pelvis",), None),
        ("leg split", ["split"], _LEGS + ("pelvis",), None),
        ("limp", ["limp"], _LEGS + ("pelvis",), None),
        ("moonwalk", ["moonwalk", "glide.*back"], _LEGS + ("pelvis",), None),
        ("stagger", ["stagger", "stumble"], _LEGS + _CORE, None),
        ("surrender", ["surrender", "hands.*up"], _ARMS, None),
    ]
    two = [
        ("walking hug", ["hug"], _ARMS + _LEGS, None),
        ("walk hold hands", ["hold.*hands"], _ARMS + _LEGS, None),
        ("walk the line", ["the line", "balance"], _LEGS + ("pelvis",), None),
        ("bump into each other", ["bump"], _CORE + _ARMS, None),
    ]
    specs = [ActionSpec(n, "sub_hmdb", p, c, object_protocol=o) for n, p, c, o in sub]
    specs += [ActionSpec(n, "one_person", p, c, object_protocol=o) for n, p, c, o in one]
    specs += [ActionSpec(n, "two_people", p, c, object_protocol=o) for n, p, c, o in two]
    return tuple(specs)


DEFAULT_ACTIONS = default_actions()
ACTION_NAMES = tuple(a.name for a in DEFAULT_ACTIONS)
