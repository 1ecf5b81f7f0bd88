"""Hand arithmetic for the bundled two-state daily weather set.

Every day of a month shares one (tmax, tmin) pair, so a month's degree days are
``days_in_month * max(mean - 65, 0)``. Rain falls on a fixed day-of-month
pattern. Region values are the plain mean of the two states.
"""
import calendar

SEASON_OF = {12: "winter", 1: "winter", 2: "winter", 3: "spring", 4: "spring", 5: "spring",
             6: "summer", 7: "summer", 8: "summer", 9: "autumn", 10: "autumn", 11: "autumn"}
OFFSET = {"AA": 0.0, "BB": 6.0}


def month_values(state, year, month):
    ndays = calendar.monthrange(year, month)[1]
    mean = ((50.0 + 3 * month + OFFSET[state]) + (30.0 + 3 * month + OFFSET[state])) / 2
    if state == "AA":
        rain = 2.5 * len([d for d in range(1, ndays + 1) if d % 4 == 0])
    else:
        rain = 1.5 * len([d for d in range(1, ndays + 1) if d % 2 == 1])
    return {"CDD": ndays * max(mean - 65, 0.0), "HDD": ndays * max(65 - mean, 0.0), "PRE": rain}


def golden_rows(years=(2001, 2003)):
    totals = {}
    for state in OFFSET:
        for year in range(years[0], years[1] + 1):
            for month in range(1, 13):
                season_year = year + 1 if month == 12 else year
                for var, v in month_values(state, year, month).items():
                    key = (var, season_year, SEASON_OF[month])
                    totals.setdefault(key, {}).setdefault(state, []).append(v)
    rows = []
    for (var, year, season), by_state in totals.items():
        if all(len(v) == 3 for v in by_state.values()):
            rows.append(("EAST", var, year, season, sum(sum(v) for v in by_state.values()) / 2))
    order = {"winter": 0, "spring": 1, "summer": 2, "autumn": 3}
    rows.sort(key=lambda r: (["CDD", "HDD", "PRE"].index(r[1]), r[2], order[r[3]]))
    return rows


def golden_csv():
    lines = ["region,variable,year,season,value"]
    lines += [f"{r},{v},{y},{s},{val!r}" for r, v, y, s, val in golden_rows()]
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    print(golden_csv(), end="")
