"""Regenerates the demo data set, name databases and replay fixtures.

Run from the repository root: python3 demo/generate.py
"""
import hashlib
import json
import shutil
from pathlib import Path

from PIL import Image

ROOT = Path(__file__).resolve().parent

# full name, country, truth, name API answer (gender, probability) or None,
# per-image face answers: list of faces [(gender, confidence, side)], "error", or []
F, M = "female", "male"
RECORDS = [
    ("Ada Lovelace", "GB", "F", (F, 0.97), [[(F, 96.1, 90)], [(F, 88.0, 60)], [], [(F, 91.2, 75)], [(M, 55.0, 20), (F, 80.0, 70)]]),
    ("John Smith", "US", "M", (M, 0.99), [[(M, 97.0, 80)], [(M, 92.5, 70)], [(M, 89.0, 64)]]),
    ("Mary Johnson", "US", "F", (F, 0.99), [[(M, 85.0, 88)], [(F, 40.0, 60)]]),
    ("Robert Brown", "US", "M", (M, 0.98), [[(M, 93.2, 77)], [], [(M, 90.0, 60)]]),
    ("Linda Davis", "US", "F", (F, 0.99), [[(F, 94.4, 81)], [(F, 87.3, 66)], [(M, 60.0, 40)]]),
    ("Jordan Miller", "US", "F", (M, 0.62), [[(F, 92.0, 85)], [(F, 90.0, 72)], [(F, 85.0, 50)]]),
    ("Casey Wilson", "US", "M", None, [[(M, 88.8, 70)], [(M, 84.0, 66)], []]),
    ("Taylor Moore", "US", "F", None, [[(F, 91.0, 74)], [(F, 79.5, 58)]]),
    ("James Taylor", "US", "M", (M, 0.99), [[(M, 96.0, 90)], [(M, 93.0, 70)]]),
    ("Patricia Anderson", "US", "F", (F, 0.99), [[(F, 97.7, 92)], []]),
    ("Andrea Rossi", "IT", "M", (M, 0.91), [[(M, 95.0, 83)], [(M, 90.0, 70)], [(F, 70.0, 30)]]),
    ("Giulia Bianchi", "IT", "F", (F, 0.99), [[(F, 93.0, 80)], [(F, 88.0, 61)]]),
    ("Luca Ferrari", "IT", "M", (M, 0.99), [[(M, 90.0, 75)], [(M, 86.0, 63)]]),
    ("Sofia Romano", "IT", "F", (F, 0.98), [[(F, 94.0, 82)], [(F, 92.0, 71)]]),
    ("Nicola Colombo", "IT", "M", (F, 0.55), [[(M, 96.0, 90)], [(M, 93.0, 76)], [(M, 88.0, 60)]]),
    ("Simone Ricci", "IT", "F", (M, 0.74), [[(F, 89.0, 70)], [(F, 94.0, 80)], [(M, 60.0, 30)]]),
    ("Giovanni Greco", "IT", "M", (M, 0.99), [[(M, 91.0, 80)], "error"]),
    ("Chiara Bruno", "IT", "F", None, [[(F, 92.0, 79)], [(F, 89.0, 64)], [(F, 77.0, 40)]]),
    ("Andrea Schmidt", "DE", "F", (F, 0.93), [[(F, 94.0, 85)], [(F, 91.0, 73)]]),
    ("Hans Mueller", "DE", "M", (M, 0.99), [[(M, 95.0, 86)], [(M, 90.0, 70)]]),
    ("Ingrid Fischer", "DE", "F", (F, 0.99), [[(F, 93.0, 81)], []]),
    ("Klaus Weber", "DE", "M", (M, 0.99), [[(F, 80.0, 84)], [(F, 60.0, 60)]]),
    ("Ursula Becker", "DE", "F", (F, 0.99), [[(F, 90.0, 77)], [(F, 91.0, 72)]]),
    ("Kai Hoffmann", "DE", "M", (M, 0.85), [[(M, 92.0, 80)], [(M, 85.0, 64)]]),
    ("Maren Schulz", "DE", "F", None, [[(F, 88.0, 70)], [(F, 92.0, 75)]]),
    ("Jannik Koch", "DE", "M", None, [[(M, 93.0, 82)], [], [(M, 87.0, 59)]]),
    ("Wei Zhang", "CN", "M", (M, 0.71), [[(M, 91.0, 80)], [(M, 85.0, 66)]]),
    ("Fang Li", "CN", "F", (F, 0.88), [[(F, 90.0, 78)], [(F, 86.0, 60)]]),
    ("Xiu Wang", "CN", "F", None, [[(F, 93.0, 83)], [(F, 90.0, 70)]]),
    ("Jun Liu", "CN", "M", None, [[(M, 89.0, 76)], [(M, 92.0, 70)], []]),
    ("Mei Chen", "CN", "F", (F, 0.95), [[(F, 94.0, 85)], []]),
    ("Yang Zhao", "CN", "M", None, [[(M, 90.0, 72)], [(M, 86.0, 62)]]),
    ("Ayse Yilmaz", "TR", "F", (F, 0.98), [[(F, 93.0, 80)], [(F, 88.0, 60)]]),
    ("Mehmet Kaya", "TR", "M", (M, 0.99), [[(M, 95.0, 84)], [(M, 92.0, 72)]]),
    ("Deniz Demir", "TR", "F", None, [[(F, 90.0, 77)], [(F, 86.0, 63)]]),
    ("Emre Sahin", "TR", "M", (M, 0.97), [[(M, 91.0, 79)], []]),
    ("José García", "ES", "M", (M, 0.99), [[(M, 94.0, 83)], [(M, 90.0, 68)]]),
    ("Lucía Martínez", "ES", "F", (F, 0.98), [[(F, 92.0, 80)], [(F, 89.0, 61)]]),
    ("Alex Morgan", "", "F", None, [[(F, 91.0, 78)], [(F, 88.0, 66)], [(M, 52.0, 20)]]),
    ("Sam Rivers", "", "M", None, [[(M, 90.0, 75)], [(M, 80.0, 60)]]),
    ("Quinn Harlow", "GB", "F", None, []),
]

SSA = {
    "yob1990.txt": [("Ada", "F", 3510), ("Ada", "M", 12), ("John", "M", 23000), ("John", "F", 61),
                    ("Mary", "F", 11000), ("Mary", "M", 14), ("Robert", "M", 19000), ("Linda", "F", 2200),
                    ("Jordan", "M", 16000), ("Jordan", "F", 2400), ("Casey", "M", 2500), ("Casey", "F", 2300),
                    ("Taylor", "F", 6000), ("Taylor", "M", 7000), ("James", "M", 22000), ("Patricia", "F", 4500),
                    ("Andrea", "F", 5000), ("Andrea", "M", 210), ("Luca", "M", 40), ("Sofia", "F", 900),
                    ("Nicola", "F", 80), ("Simone", "F", 120), ("Kai", "M", 300), ("Alex", "M", 1200),
                    ("Alex", "F", 400), ("Sam", "M", 300), ("Sam", "F", 110), ("Jose", "M", 9000),
                    ("Deniz", "M", 5), ("Chiara", "F", 30)],
    "yob2000.txt": [("Ada", "F", 3480), ("Ada", "M", 18), ("John", "M", 17000), ("Mary", "F", 6000),
                    ("Robert", "M", 11000), ("Linda", "F", 900), ("Jordan", "M", 12000), ("Jordan", "F", 3000),
                    ("Casey", "M", 3000), ("Casey", "F", 3600), ("Taylor", "F", 11000), ("Taylor", "M", 4500),
                    ("James", "M", 18000), ("Patricia", "F", 1800), ("Andrea", "F", 3000), ("Andrea", "M", 190),
                    ("Sofia", "F", 2500), ("Giovanni", "M", 150), ("Mei", "F", 60), ("Emre", "M", 20),
                    ("Kai", "M", 700), ("Alex", "M", 1500), ("Alex", "F", 600)],
}

CENSUS = [("ada", 40, 9000), ("john", 50000, 120), ("mary", 90, 40000), ("robert", 38000, 100),
          ("linda", 20, 12000), ("jordan", 9000, 2500), ("casey", 2200, 2600), ("taylor", 1500, 3100),
          ("james", 52000, 200), ("patricia", 10, 15000), ("andrea", 800, 7000), ("luca", 120, 0),
          ("sofia", 0, 600), ("klaus", 300, 0), ("ursula", 0, 500), ("wei", 700, 200), ("mei", 5, 300),
          ("jose", 20000, 40), ("lucia", 10, 3000), ("alex", 3000, 900), ("sam", 2000, 500)]

# code, name, {column index: rank}; columns follow the dictionary layout
COLS = ["GB", "IE", "US", "IT", "MT", "PT", "ES", "FR", "BE", "LU", "NL", "east_frisia", "DE", "AT", "CH",
        "IS", "DK", "NO", "SE", "FI", "EE", "LV", "LT", "PL", "CZ", "SK", "HU", "RO", "BG", "BA", "HR", "XK",
        "MK", "ME", "RS", "SI", "AL", "GR", "RU", "BY", "MD", "UA", "AM", "AZ", "GE", "KZ", "TR", "SA", "IL",
        "CN", "IN", "JP", "KR", "VN", "other"]
DICT = [("F", "Ada", {"GB": 6, "US": 7}), ("M", "John", {"GB": 13, "US": 13}), ("F", "Mary", {"GB": 12, "US": 13}),
        ("M", "Robert", {"US": 12, "GB": 11}), ("F", "Linda", {"US": 11, "SE": 8}), ("?M", "Jordan", {"US": 9}),
        ("?", "Casey", {"US": 7}), ("?F", "Taylor", {"US": 8}), ("M", "James", {"GB": 13, "US": 13}),
        ("F", "Patricia", {"US": 11, "ES": 7}), ("F", "Andrea", {"DE": 13, "AT": 9, "US": 8}),
        ("M", "Andrea", {"IT": 12, "CH": 6}), ("F", "Giulia", {"IT": 12}), ("M", "Luca", {"IT": 12}),
        ("F", "Sofia", {"IT": 10, "ES": 9, "SE": 8}), ("M", "Nicola", {"IT": 11}), ("1F", "Nicola", {"DE": 3, "GB": 2}),
        ("M", "Simone", {"IT": 11}), ("F", "Simone", {"FR": 11, "DE": 7}), ("M", "Giovanni", {"IT": 13}),
        ("F", "Chiara", {"IT": 12}), ("M", "Hans", {"DE": 12}), ("F", "Ingrid", {"DE": 7, "SE": 9}),
        ("M", "Klaus", {"DE": 11}), ("F", "Ursula", {"DE": 10}), ("1M", "Kai", {"DE": 9}), ("F", "Maren", {"DE": 6}),
        ("M", "Jannik", {"DE": 7}), ("M", "Wei", {"CN": 13}), ("F", "Fang", {"CN": 11}), ("?F", "Xiu", {"CN": 6}),
        ("?M", "Jun", {"CN": 9, "JP": 8}), ("F", "Mei", {"CN": 10}), ("?", "Yang", {"CN": 9}), ("F", "Ayse", {"TR": 13}),
        ("M", "Mehmet", {"TR": 13}), ("?", "Deniz", {"TR": 10}), ("M", "Emre", {"TR": 11}), ("M", "José", {"ES": 13}),
        ("F", "Lucía", {"ES": 11}), ("?M", "Alex", {"GB": 8, "US": 9}), ("?M", "Sam", {"GB": 9, "US": 9}),
        ("=", "Josef", "Jose")]
HEX = " 123456789ABCD"


def first_key(full_name):
    import unicodedata
    token = full_name.split()[0].lower()
    return "".join(c for c in unicodedata.normalize("NFKD", token) if not unicodedata.combining(c))


def query_hash(query):
    return hashlib.sha256(query.encode("utf-8")).hexdigest()[:16]


def thumbnail(seed):
    digest = hashlib.sha256(seed.encode("utf-8")).digest()
    img = Image.new("RGB", (16, 16))
    img.putdata([(digest[i % 32], digest[(i * 7) % 32], digest[(i * 13) % 32]) for i in range(256)])
    from io import BytesIO
    buf = BytesIO()
    img.save(buf, format="JPEG", quality=60)
    return buf.getvalue()


def face_body(faces):
    out = []
    for i, (gender, conf, side) in enumerate(faces):
        out.append({
            "face_token": hashlib.md5(f"{gender}{conf}{side}{i}".encode()).hexdigest(),
            "face_rectangle": {"top": 4 + i * 10, "left": 6 + i * 30, "width": side, "height": side},
            "attributes": {"gender": {"value": gender.capitalize(), "confidence": conf}},
        })
    return {"request_id": "demo", "time_used": 42, "faces": out, "image_id": "demo"}


def main():
    fixtures = ROOT / "fixtures"
    shutil.rmtree(fixtures, ignore_errors=True)
    fixtures.mkdir()
    genderize = {}
    with open(ROOT / "dataset.csv", "w", encoding="utf-8") as f:
        f.write("full_name,country,gender\n")
        for name, country, truth, api, images in RECORDS:
            f.write(f"{name},{country},{truth}\n")
            first = first_key(name)
            query = f"name={first}" + (f"&country_id={country}" if country else "")
            if api is None:
                body = {"count": 0, "name": first, "gender": None, "probability": 0.0}
            else:
                body = {"count": 1000, "name": first, "gender": api[0], "probability": api[1]}
            if country:
                body["country_id"] = country
            genderize[query] = body
            d = fixtures / query_hash(" ".join(name.split()))
            d.mkdir()
            for rank, faces in enumerate(images, start=1):
                (d / f"{rank}.jpg").write_bytes(thumbnail(f"{name}#{rank}"))
                if faces == "error":
                    err = {"error_message": "IMAGE_ERROR_UNSUPPORTED_FORMAT: image_file", "request_id": "demo"}
                    (d / f"{rank}.400.json").write_text(json.dumps(err) + "\n")
                else:
                    (d / f"{rank}.json").write_text(json.dumps(face_body(faces), indent=1) + "\n")
    (fixtures / "genderize.json").write_text(json.dumps(genderize, indent=1, ensure_ascii=False) + "\n",
                                              encoding="utf-8")

    ssa = ROOT / "ssa"
    shutil.rmtree(ssa, ignore_errors=True)
    ssa.mkdir()
    for file, rows in SSA.items():
        (ssa / file).write_text("".join(f"{n},{s},{c}\n" for n, s, c in rows), encoding="utf-8")
    (ROOT / "census.csv").write_text(
        "name,male_count,female_count\n" + "".join(f"{n},{m},{f}\n" for n, m, f in CENSUS))

    lines = ["# demo dictionary"]
    for code, name, freqs in DICT:
        if code == "=":
            lines.append(f"=  {name} {freqs}")
            continue
        row = list(f"{code:<2} {name:<26} ") + [" "] * 55
        for key, rank in freqs.items():
            row[30 + COLS.index(key)] = HEX[rank]
        lines.append("".join(row).rstrip())
    (ROOT / "nam_dict.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
