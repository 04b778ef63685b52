"""Regenerate resolution_table.json from a line-by-line transcription of the pseudocode.

Kept free of clothfold imports so the table stays an independent check.
Run: python tests/fixtures/build_resolution_table.py
"""

import itertools
import json
from pathlib import Path

CORNERS = [("top", "left"), ("top", "right"), ("bottom", "left"), ("bottom", "right")]
S_PICK = [None, "top", "bottom", "left", "right", "top left", "top right", "bottom left", "bottom right"]
OPP = {"top": "bottom", "bottom": "top", "left": "right", "right": "left"}


def opposite_location(s):
    return " ".join(OPP[w] for w in s.split())


def transcribed(lv, lh, rv, rh, action, garment, s_pick, literal):
    v = lv if lv == rv else None
    h = lh if lh == rh else None
    if h is not None:
        if v is not None:
            if action == "place":
                if s_pick == h:
                    return v, False
                elif s_pick == v:
                    return h, False
                elif s_pick == OPP[h]:
                    return h, False
                elif s_pick == OPP[v]:
                    return v, False
                else:
                    return v + " " + h, False
            else:
                if garment == "Tshirt" and v == "top":
                    return h, True
                else:
                    return v + " " + h, False
        else:
            return h, False
    else:
        if v is not None:
            # printed pseudocode returns h here, which is null on this branch
            return (h if literal else v), False
        else:
            if action == "place":
                return opposite_location(s_pick), False
            return "error", False


def main():
    rows = []
    for (lv, lh), (rv, rh), action, garment, s_pick in itertools.product(
        CORNERS, CORNERS, ["pick", "place"], ["Tshirt", "Skirt"], S_PICK
    ):
        row = {
            "left": [lv, lh],
            "right": [rv, rh],
            "action": action,
            "garment": garment,
            "s_pick": s_pick,
        }
        if action == "place" and s_pick is None:
            row["expected"] = "invalid"
            row["literal"] = "invalid"
        else:
            text, sleeve = transcribed(lv, lh, rv, rh, action, garment, s_pick, literal=False)
            row["expected"] = text
            row["sleeve_flag"] = sleeve
            lit, _ = transcribed(lv, lh, rv, rh, action, garment, s_pick, literal=True)
            row["literal"] = lit
        rows.append(row)
    out = Path(__file__).with_name("resolution_table.json")
    out.write_text(json.dumps(rows, indent=1) + "\n")
    print(f"{len(rows)} rows -> {out}")


if __name__ == "__main__":
    main()
