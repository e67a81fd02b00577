#include "roughness/sensor_log_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "roughness/config.hpp"
#include "roughness/errors.hpp"

namespace roughness {

namespace {

constexpr std::string_view kPoseHeader = "timestamp x y z roll pitch yaw roll_rate pitch_rate";
constexpr std::string_view kImuHeader = "timestamp accel_z";
constexpr std::string_view kSpeedHeader = "timestamp mph";
constexpr std::string_view kTruthHeader = "s lateral height half_width half_length";

std::string scan_header()
{
    std::string h = "timestamp";
    for (std::size_t b = 0; b < kBeamsPerScan; ++b)
        h += " r" + std::to_string(b);
    return h;
}

class LineWriter {
public:
    explicit LineWriter(const std::filesystem::path& file) : out_(file, std::ios::binary), name_(file.string())
    {
        if (!out_)
            throw DataError("cannot write " + name_);
    }
    ~LineWriter() { flush(); }

    void text(std::string_view s) { buf_.append(s); }
    void number(double v)
    {
        char tmp[32];
        const auto res = std::to_chars(tmp, tmp + sizeof tmp, v);
        buf_.append(tmp, res.ptr);
    }
    void fixed4(double v)
    {
        char tmp[32];
        const auto res = std::to_chars(tmp, tmp + sizeof tmp, v, std::chars_format::fixed, 4);
        buf_.append(tmp, res.ptr);
    }
    void sep() { buf_.push_back(' '); }
    void end()
    {
        buf_.push_back('\n');
        if (buf_.size() > (1u << 20))
            flush();
    }
    void flush()
    {
        out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        buf_.clear();
    }

private:
    std::ofstream out_;
    std::string name_;
    std::string buf_;
};

void write_poses(const std::filesystem::path& file, const std::vector<PoseSample>& poses)
{
    LineWriter w(file);
    w.text(kPoseHeader);
    w.end();
    for (const PoseSample& p : poses) {
        w.number(p.timestamp);
        for (double v : {p.position.x, p.position.y, p.position.z, p.roll, p.pitch, p.yaw, p.roll_rate,
                         p.pitch_rate}) {
            w.sep();
            w.number(v);
        }
        w.end();
    }
}

// Parses whitespace-separated numeric rows after checking the header row.
void read_table(const std::filesystem::path& file, std::string_view header, std::size_t columns,
                const std::function<void(const std::vector<double>&)>& row)
{
    std::ifstream in(file, std::ios::binary);
    const std::string name = file.filename().string();
    if (!in)
        throw SchemaError(name, "missing file");
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw SchemaError(name + ":1", "unexpected header row");
    std::vector<double> values(columns);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        std::size_t n = 0;
        while (p < end) {
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r'))
                ++p;
            if (p == end)
                break;
            if (n == columns)
                throw SchemaError(name + ":" + std::to_string(line_no), "too many columns");
            const auto res = std::from_chars(p, end, values[n]);
            if (res.ec != std::errc())
                throw SchemaError(name + ":" + std::to_string(line_no),
                                  "column " + std::to_string(n + 1) + " is not a number");
            p = res.ptr;
            ++n;
        }
        if (n != columns)
            throw SchemaError(name + ":" + std::to_string(line_no),
                              "expected " + std::to_string(columns) + " columns, got " + std::to_string(n));
        row(values);
    }
}

template <class T>
void require_ordered(const std::vector<T>& v, const char* what)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i].timestamp > v[i - 1].timestamp))
            throw DataError(std::string(what) + " is not strictly time-ordered at row " + std::to_string(i + 1));
}

std::vector<PoseSample> read_poses(const std::filesystem::path& file)
{
    std::vector<PoseSample> out;
    read_table(file, kPoseHeader, 9, [&](const std::vector<double>& v) {
        PoseSample p;
        p.timestamp = v[0];
        p.position = {v[1], v[2], v[3]};
        p.roll = v[4];
        p.pitch = v[5];
        p.yaw = v[6];
        p.roll_rate = v[7];
        p.pitch_rate = v[8];
        out.push_back(p);
    });
    return out;
}

}  // namespace

void write_sensor_log(const std::filesystem::path& dir, const SensorLog& log, const nlohmann::json& extra)
{
    std::filesystem::create_directories(dir);
    {
        LineWriter w(dir / "scans.txt");
        w.text(scan_header());
        w.end();
        for (const RawScan& s : log.scans) {
            w.number(s.timestamp);
            for (double r : s.ranges) {
                w.sep();
                w.fixed4(r);
            }
            w.end();
        }
    }
    write_poses(dir / "poses.txt", log.poses);
    write_poses(dir / "true_poses.txt", log.true_poses);
    {
        LineWriter w(dir / "imu.txt");
        w.text(kImuHeader);
        w.end();
        for (const ImuSample& s : log.imu) {
            w.number(s.timestamp);
            w.sep();
            w.number(s.accel_z);
            w.end();
        }
    }
    {
        LineWriter w(dir / "speeds.txt");
        w.text(kSpeedHeader);
        w.end();
        for (const SpeedSample& s : log.speeds) {
            w.number(s.timestamp);
            w.sep();
            w.number(s.mph);
            w.end();
        }
    }
    {
        LineWriter w(dir / "truth.txt");
        w.text(kTruthHeader);
        w.end();
        for (const Bump& b : log.terrain.bumps) {
            w.number(b.s);
            for (double v : {b.lateral, b.height, b.half_width, b.half_length}) {
                w.sep();
                w.number(v);
            }
            w.end();
        }
    }

    nlohmann::json manifest = {
        {"format", "roughness-sensor-log"},
        {"version", 1},
        {"sim", sim_to_json(log.config)},
        {"terrain",
         {{"track_length", log.terrain.track_length},
          {"base_amplitude", log.terrain.base_amplitude},
          {"base_phases", log.terrain.base_phases},
          {"bump_search_radius", log.terrain.bump_search_radius}}},
        {"start_s", log.start_s},
        {"end_s", log.end_s},
        {"counts",
         {{"scans", log.scans.size()},
          {"poses", log.poses.size()},
          {"imu", log.imu.size()},
          {"speeds", log.speeds.size()},
          {"bumps", log.terrain.bumps.size()}}},
    };
    for (const auto& [k, v] : extra.items())
        manifest[k] = v;
    std::ofstream out(dir / "manifest.json");
    if (!out)
        throw DataError("cannot write manifest in " + dir.string());
    out << manifest.dump(2) << '\n';
}

nlohmann::json read_manifest(const std::filesystem::path& dir)
{
    std::ifstream in(dir / "manifest.json");
    if (!in)
        throw SchemaError("manifest.json", "missing file in " + dir.string());
    const nlohmann::json m = nlohmann::json::parse(in, nullptr, false);
    if (m.is_discarded() || !m.is_object())
        throw SchemaError("manifest.json", "not a JSON object");
    if (m.value("format", "") != "roughness-sensor-log")
        throw SchemaError("manifest.json:format", "not a sensor log manifest");
    return m;
}

SensorLog read_sensor_log(const std::filesystem::path& dir)
{
    const nlohmann::json m = read_manifest(dir);
    SensorLog log;
    try {
        log.config = sim_from_json(m.at("sim"));
        const auto& t = m.at("terrain");
        log.terrain.track_length = t.at("track_length").get<double>();
        log.terrain.base_amplitude = t.at("base_amplitude").get<double>();
        log.terrain.base_phases = t.at("base_phases").get<std::array<double, 3>>();
        log.terrain.bump_search_radius = t.at("bump_search_radius").get<double>();
        log.start_s = m.at("start_s").get<double>();
        log.end_s = m.at("end_s").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("manifest.json", e.what());
    }

    read_table(dir / "scans.txt", scan_header(), kBeamsPerScan + 1, [&](const std::vector<double>& v) {
        RawScan s;
        s.timestamp = v[0];
        std::copy(v.begin() + 1, v.end(), s.ranges.begin());
        s.angular_resolution_deg = log.config.angular_resolution_deg;
        s.scan_frequency_hz = log.config.scan_frequency;
        log.scans.push_back(s);
    });
    log.poses = read_poses(dir / "poses.txt");
    log.true_poses = read_poses(dir / "true_poses.txt");
    read_table(dir / "imu.txt", kImuHeader, 2,
               [&](const std::vector<double>& v) { log.imu.push_back({v[0], v[1]}); });
    read_table(dir / "speeds.txt", kSpeedHeader, 2,
               [&](const std::vector<double>& v) { log.speeds.push_back({v[0], v[1]}); });
    read_table(dir / "truth.txt", kTruthHeader, 5, [&](const std::vector<double>& v) {
        log.terrain.bumps.push_back({v[0], v[1], v[2], v[3], v[4]});
    });

    require_ordered(log.scans, "scans.txt");
    require_ordered(log.poses, "poses.txt");
    require_ordered(log.true_poses, "true_poses.txt");
    require_ordered(log.imu, "imu.txt");
    require_ordered(log.speeds, "speeds.txt");
    try {
        log.terrain.validate();
    } catch (const ConfigError& e) {
        throw SchemaError("truth.txt", e.what());
    }
    return log;
}

}  // namespace roughness
