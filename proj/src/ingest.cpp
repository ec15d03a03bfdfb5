#include "comapipe/ingest.hpp"

#include "comapipe/errors.hpp"
#include "comapipe/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace comapipe::ingest {

namespace fs = std::filesystem;

Outcome outcome_from_cpc(int cpc) {
    if (cpc < 1 || cpc > 5) {
        throw ValidationError("CPC out of range 1..5: " + std::to_string(cpc));
    }
    return cpc <= 2 ? Outcome::Good : Outcome::Poor;
}

const char* to_string(Sex s) { return s == Sex::Male ? "Male" : "Female"; }
const char* to_string(Ttm t) {
    switch (t) {
        case Ttm::T33: return "33";
        case Ttm::T36: return "36";
        default: return "None";
    }
}
const char* to_string(Outcome o) { return o == Outcome::Good ? "Good" : "Poor"; }

void ClinicalRecord::validate() const {
    if (age && (*age < 0.0 || *age > 130.0)) {
        throw ValidationError("age out of range [0, 130]: " + std::to_string(*age));
    }
    if (rosc_minutes && *rosc_minutes < 0.0) {
        throw ValidationError("ROSC must be >= 0: " + std::to_string(*rosc_minutes));
    }
    if (cpc && (*cpc < 1 || *cpc > 5)) {
        throw ValidationError("CPC out of range 1..5: " + std::to_string(*cpc));
    }
    if (cpc && outcome && *outcome != outcome_from_cpc(*cpc)) {
        throw ValidationError("outcome inconsistent with CPC " + std::to_string(*cpc));
    }
}

void EegSegment::validate() const {
    if (fs <= 0.0) throw FormatError("fs must be > 0");
    if (hour < 0) throw FormatError("hour must be >= 0");
    if (channels.size() != samples.size()) {
        throw FormatError("channel name count does not match sample rows");
    }
    if (samples.empty() || samples.front().empty()) {
        throw FormatError("segment has no samples");
    }
    const std::size_t n = samples.front().size();
    for (const auto& row : samples) {
        if (row.size() != n) throw FormatError("ragged sample rows");
    }
    std::set<std::string> names(channels.begin(), channels.end());
    if (names.size() != channels.size()) throw FormatError("duplicate channel names");
}

namespace {

std::optional<bool> parse_bool_value(const std::string& v, const std::string& key) {
    const std::string low = to_lower(v);
    if (low == "true" || low == "1" || low == "yes") return true;
    if (low == "false" || low == "0" || low == "no") return false;
    throw ValidationError("cannot read boolean for " + key + ": " + v);
}

} // namespace

ParseResult parse_clinical(const std::string& text) {
    ParseResult res;
    ClinicalRecord& rec = res.record;
    std::optional<Outcome> explicit_outcome;

    int line_no = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) {
            throw ParseError("line " + std::to_string(line_no) + ": expected `Key: Value`");
        }
        const std::string key = to_lower(trim(line.substr(0, colon)));
        const std::string value = trim(line.substr(colon + 1));
        const bool missing = is_missing_marker(value);

        if (key == "patient") {
            if (!missing) rec.patient_id = value;
        } else if (key == "age") {
            if (missing) continue;
            const auto v = parse_double(value);
            if (!v) throw ValidationError("cannot read Age: " + value);
            rec.age = *v;
        } else if (key == "sex") {
            if (missing) continue;
            const std::string low = to_lower(value);
            if (low == "male" || low == "m") rec.sex = Sex::Male;
            else if (low == "female" || low == "f") rec.sex = Sex::Female;
            else throw ValidationError("cannot read Sex: " + value);
        } else if (key == "rosc") {
            if (missing) continue;
            const auto v = parse_double(value);
            if (!v) throw ValidationError("cannot read ROSC: " + value);
            rec.rosc_minutes = *v;
        } else if (key == "ohca") {
            if (missing) continue;
            rec.ohca = parse_bool_value(value, "OHCA");
        } else if (key == "shockable rhythm") {
            if (missing) continue;
            rec.shockable_rhythm = parse_bool_value(value, "Shockable Rhythm");
        } else if (key == "ttm") {
            if (missing) {
                rec.ttm = Ttm::None;
                continue;
            }
            const auto v = parse_double(value);
            if (v && *v == 33.0) rec.ttm = Ttm::T33;
            else if (v && *v == 36.0) rec.ttm = Ttm::T36;
            else rec.ttm = Ttm::None;
        } else if (key == "cpc") {
            if (missing) continue;
            const auto v = parse_int(value);
            if (!v) throw ValidationError("cannot read CPC: " + value);
            rec.cpc = static_cast<int>(*v);
        } else if (key == "outcome") {
            if (missing) continue;
            const std::string low = to_lower(value);
            if (low == "good") explicit_outcome = Outcome::Good;
            else if (low == "poor") explicit_outcome = Outcome::Poor;
            else throw ValidationError("cannot read Outcome: " + value);
        } else {
            res.warnings.push_back("unknown key ignored: " + trim(line.substr(0, colon)));
        }
    }

    if (explicit_outcome) {
        rec.outcome = explicit_outcome;
    } else if (rec.cpc) {
        rec.outcome = outcome_from_cpc(*rec.cpc);
    }
    rec.validate();
    return res;
}

std::string render_clinical(const ClinicalRecord& rec) {
    std::ostringstream out;
    auto num = [](const std::optional<double>& v) -> std::string {
        if (!v) return "nan";
        std::ostringstream s;
        s << *v;
        return s.str();
    };
    out << "Patient: " << rec.patient_id << "\n";
    out << "Age: " << num(rec.age) << "\n";
    out << "Sex: " << (rec.sex ? to_string(*rec.sex) : "nan") << "\n";
    out << "ROSC: " << num(rec.rosc_minutes) << "\n";
    out << "OHCA: " << (rec.ohca ? (*rec.ohca ? "True" : "False") : "nan") << "\n";
    out << "Shockable Rhythm: "
        << (rec.shockable_rhythm ? (*rec.shockable_rhythm ? "True" : "False") : "nan") << "\n";
    out << "TTM: " << to_string(rec.ttm) << "\n";
    out << "CPC: " << (rec.cpc ? std::to_string(*rec.cpc) : "nan") << "\n";
    out << "Outcome: " << (rec.outcome ? to_string(*rec.outcome) : "nan") << "\n";
    return out.str();
}

EegSegment read_segment(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);

    std::string header;
    if (!std::getline(in, header)) throw FormatError(path + ": missing header line");

    EegSegment seg;
    bool have_fs = false, have_channels = false, have_hour = false;
    for (const auto& tokenRaw : split(header, ' ')) {
        const std::string token = trim(tokenRaw);
        if (token.empty()) continue;
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw FormatError(path + ": bad header token: " + token);
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "fs") {
            const auto v = parse_double(value);
            if (!v) throw FormatError(path + ": bad fs: " + value);
            seg.fs = *v;
            have_fs = true;
        } else if (key == "channels") {
            for (const auto& name : split(value, ',')) {
                if (!trim(name).empty()) seg.channels.push_back(trim(name));
            }
            have_channels = true;
        } else if (key == "hour") {
            const auto v = parse_int(value);
            if (!v) throw FormatError(path + ": bad hour: " + value);
            seg.hour = static_cast<int>(*v);
            have_hour = true;
        } else {
            throw FormatError(path + ": unknown header key: " + key);
        }
    }
    if (!have_fs || !have_channels || !have_hour) {
        throw FormatError(path + ": header must carry fs, channels, hour");
    }
    if (seg.fs <= 0.0) throw FormatError(path + ": fs must be > 0");
    if (seg.channels.empty()) throw FormatError(path + ": no channels");

    const std::streampos data_start = in.tellg();
    in.seekg(0, std::ios::end);
    const std::streampos end = in.tellg();
    const std::uint64_t n_bytes = static_cast<std::uint64_t>(end - data_start);
    if (n_bytes % 4 != 0) throw FormatError(path + ": sample block not float32-aligned");
    const std::uint64_t n_floats = n_bytes / 4;
    if (n_floats == 0) throw FormatError(path + ": empty sample block");
    if (n_floats % seg.channels.size() != 0) {
        throw FormatError(path + ": sample count does not divide evenly by channel count");
    }
    const std::size_t n_per_channel = static_cast<std::size_t>(n_floats / seg.channels.size());

    in.seekg(data_start);
    std::vector<float> raw(n_floats);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n_bytes));
    if (!in) throw IoError(path + ": short read");

    seg.samples.resize(seg.channels.size());
    std::size_t pos = 0;
    for (auto& row : seg.samples) {
        row.resize(n_per_channel);
        for (std::size_t i = 0; i < n_per_channel; ++i) {
            row[i] = static_cast<double>(raw[pos++]);
        }
    }
    seg.validate();
    return seg;
}

void write_segment(const std::string& path, const EegSegment& seg) {
    seg.validate();
    std::ostringstream header;
    header << "fs=" << seg.fs << " channels=";
    for (std::size_t i = 0; i < seg.channels.size(); ++i) {
        if (i) header << ",";
        header << seg.channels[i];
    }
    header << " hour=" << seg.hour << "\n";

    std::string blob = header.str();
    const std::size_t n = seg.n_samples();
    blob.reserve(blob.size() + seg.n_channels() * n * 4);
    for (const auto& row : seg.samples) {
        for (double v : row) {
            const float f = static_cast<float>(v);
            char bytes[4];
            std::memcpy(bytes, &f, 4);
            blob.append(bytes, 4);
        }
    }
    write_file_atomic(path, blob);
}

PatientRecord load_patient(const std::string& dir) {
    PatientRecord rec;
    const fs::path clinical_path = fs::path(dir) / "clinical.txt";
    if (!fs::exists(clinical_path)) throw IoError("no clinical.txt in " + dir);
    rec.clinical = parse_clinical(read_file(clinical_path.string())).record;
    if (rec.clinical.patient_id.empty()) {
        rec.clinical.patient_id = fs::path(dir).filename().string();
    }

    std::vector<std::string> sig_files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".sig") {
            sig_files.push_back(entry.path().string());
        }
    }
    std::sort(sig_files.begin(), sig_files.end());
    for (const auto& p : sig_files) rec.segments.push_back(read_segment(p));

    std::sort(rec.segments.begin(), rec.segments.end(),
              [](const EegSegment& a, const EegSegment& b) { return a.hour < b.hour; });
    for (std::size_t i = 1; i < rec.segments.size(); ++i) {
        if (rec.segments[i].hour == rec.segments[i - 1].hour) {
            throw ValidationError(rec.clinical.patient_id + ": duplicate segment for hour " +
                                  std::to_string(rec.segments[i].hour));
        }
    }
    return rec;
}

std::vector<PatientRecord> load_cohort(const std::string& data_root) {
    if (!fs::is_directory(data_root)) throw IoError("not a directory: " + data_root);
    std::vector<std::string> dirs;
    for (const auto& entry : fs::directory_iterator(data_root)) {
        if (entry.is_directory() && fs::exists(entry.path() / "clinical.txt")) {
            dirs.push_back(entry.path().string());
        }
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<PatientRecord> out;
    out.reserve(dirs.size());
    for (const auto& d : dirs) out.push_back(load_patient(d));
    std::sort(out.begin(), out.end(), [](const PatientRecord& a, const PatientRecord& b) {
        return a.clinical.patient_id < b.clinical.patient_id;
    });
    return out;
}

namespace {

NumericStat numeric_stat(const std::vector<double>& values, std::size_t cohort) {
    NumericStat s;
    s.present = values.size();
    s.missing = cohort - values.size();
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

CategoricalStat categorical_stat(const std::vector<std::pair<std::string, std::size_t>>& counts,
                                 std::size_t present, std::size_t cohort) {
    CategoricalStat s;
    s.present = present;
    s.missing = cohort - present;
    for (const auto& [label, count] : counts) {
        CategoryCount c;
        c.label = label;
        c.count = count;
        c.percent = present ? 100.0 * static_cast<double>(count) / static_cast<double>(present) : 0.0;
        s.categories.push_back(c);
    }
    return s;
}

} // namespace

CohortSummary summarize_cohort(const std::vector<PatientRecord>& records) {
    if (records.empty()) throw ArgumentError("summarize_cohort: empty cohort");
    CohortSummary s;
    s.n_patients = records.size();

    std::vector<double> ages, roscs;
    std::size_t male = 0, sex_present = 0;
    std::size_t ohca_true = 0, ohca_present = 0;
    std::size_t shock_true = 0, shock_present = 0;
    std::size_t t33 = 0, t36 = 0, tna = 0;
    std::size_t poor = 0, outcome_present = 0;

    for (const auto& r : records) {
        const auto& c = r.clinical;
        if (c.age) ages.push_back(*c.age);
        if (c.rosc_minutes) roscs.push_back(*c.rosc_minutes);
        if (c.sex) {
            ++sex_present;
            if (*c.sex == Sex::Male) ++male;
        }
        if (c.ohca) {
            ++ohca_present;
            if (*c.ohca) ++ohca_true;
        }
        if (c.shockable_rhythm) {
            ++shock_present;
            if (*c.shockable_rhythm) ++shock_true;
        }
        switch (c.ttm) {
            case Ttm::T33: ++t33; break;
            case Ttm::T36: ++t36; break;
            case Ttm::None: ++tna; break;
        }
        if (c.outcome) {
            ++outcome_present;
            if (*c.outcome == Outcome::Poor) ++poor;
        }
    }

    const std::size_t n = records.size();
    s.age = numeric_stat(ages, n);
    s.rosc = numeric_stat(roscs, n);
    s.sex = categorical_stat({{"Male", male}, {"Female", sex_present - male}}, sex_present, n);
    s.ohca = categorical_stat({{"True", ohca_true}, {"False", ohca_present - ohca_true}},
                              ohca_present, n);
    s.shockable = categorical_stat(
        {{"True", shock_true}, {"False", shock_present - shock_true}}, shock_present, n);
    s.ttm = categorical_stat({{"33", t33}, {"36", t36}, {"na", tna}}, n, n);
    s.outcome = categorical_stat({{"Poor", poor}, {"Good", outcome_present - poor}},
                                 outcome_present, n);
    return s;
}

std::string render_summary(const CohortSummary& s) {
    std::ostringstream out;
    char buf[160];
    out << "Patients: " << s.n_patients << "\n";
    out << "Feature                          | Value          | Missing\n";
    out << "---------------------------------+----------------+--------\n";
    std::snprintf(buf, sizeof(buf), "%-33s| %.1f (%.1f)    | %zu\n",
                  "Age [years], mean (SD)", s.age.mean, s.age.sd, s.age.missing);
    out << buf;
    const auto& male = s.sex.categories.front();
    std::snprintf(buf, sizeof(buf), "%-33s| %zu (%.0f%%)      | %zu\n", "Sex [Male], N (%)",
                  male.count, male.percent, s.sex.missing);
    out << buf;
    std::snprintf(buf, sizeof(buf), "%-33s| %.1f (%.1f)    | %zu\n",
                  "ROSC [minutes], mean (SD)", s.rosc.mean, s.rosc.sd, s.rosc.missing);
    out << buf;
    const auto& ohca = s.ohca.categories.front();
    std::snprintf(buf, sizeof(buf), "%-33s| %zu (%.0f%%)      | %zu\n", "OHCA [True], N (%)",
                  ohca.count, ohca.percent, s.ohca.missing);
    out << buf;
    const auto& shock = s.shockable.categories.front();
    std::snprintf(buf, sizeof(buf), "%-33s| %zu (%.0f%%)      | %zu\n",
                  "Shockable rhythm [True], N (%)", shock.count, shock.percent,
                  s.shockable.missing);
    out << buf;
    std::snprintf(buf, sizeof(buf), "%-33s| %zu/%zu/%zu     | %zu\n", "TTM, N at 33/36/na",
                  s.ttm.categories[0].count, s.ttm.categories[1].count, s.ttm.categories[2].count,
                  s.ttm.missing);
    out << buf;
    const auto& poor = s.outcome.categories.front();
    std::snprintf(buf, sizeof(buf), "%-33s| %zu (%.0f%%)      | %zu\n", "Outcome [Poor], N (%)",
                  poor.count, poor.percent, s.outcome.missing);
    out << buf;
    return out.str();
}

} // namespace comapipe::ingest
