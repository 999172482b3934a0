"""Small on-disk input sets for pipeline and CLI tests."""

from pathlib import Path

ZONE_HEADER = "zone,P,VP,ER,STR,STUR,EMPE,SHOP,ST,STU,HOSPB,PARK,DRA,DB,DT,DQ,DF,DR,D128,D444,DIST"
ZONE_ROWS = [
    "1,20000,0.25,7000,2500,200,2500,60,2200,100,20,4,0,0,0,0,0,0,0,0,3.0",
    "2,12000,0.2,4000,1500,300,6000,120,1500,400,80,3,0,0,0,1,0,0,0,0,2.0",
]
LINK_ROWS = [
    "1 2 900.0 4.0 6.0 0.15 4.0 1.0 ;",
    "2 1 900.0 4.0 6.0 0.15 4.0 1.0 ;",
]


def write_fixture(root: Path, links=LINK_ROWS, zone_header=ZONE_HEADER, scenarios=None, extra="") -> Path:
    root.mkdir(parents=True, exist_ok=True)
    (root / "network.tntp").write_text(
        f"<NUMBER OF ZONES> 2\n<NUMBER OF NODES> 2\n<NUMBER OF LINKS> {len(links)}\n<FIRST THRU NODE> 1\n<END OF METADATA>\n"
        "~ from to capacity length free_flow_time alpha beta accident_mult ;\n" + "\n".join(links) + "\n"
    )
    (root / "zones.csv").write_text("\n".join([zone_header, *ZONE_ROWS]) + "\n")
    (root / "skims.csv").write_text(
        "origin,dest,TIMCAR,TIMMOT,TIMTAX,TIMBIN,TIMBOT,DIST\n1,2,7.0,6.0,11.0,14.0,10.0,4.0\n2,1,7.0,6.0,11.0,14.0,10.0,4.0\n"
    )
    (root / "ownership.csv").write_text("zone,OWNCAR,OWNMOT,DESFLAG\n1,0.25,0.08,0\n2,0.2,0.06,1\n")
    names = []
    for name, text in (scenarios or {}).items():
        (root / f"{name}.scn").write_text(text)
        names.append(f'"{name}.scn"')
    (root / "config.toml").write_text(
        "[paths]\nnetwork = \"network.tntp\"\nzones = \"zones.csv\"\nskims = \"skims.csv\"\n"
        f"ownership = \"ownership.csv\"\nscenarios = [{', '.join(names)}]\noutput = \"out\"\n"
        "[horizon]\nyears = 3\ndiscount_rate = 0.08\n" + extra
    )
    return root / "config.toml"
