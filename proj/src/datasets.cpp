#include "smip/datasets.hpp"

#include "smip/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace smip {

namespace {

std::string type_name(ColumnType t)
{
    switch (t) {
    case ColumnType::Numeric:
        return "numeric";
    case ColumnType::Categorical:
        return "categorical";
    case ColumnType::Ignore:
        break;
    }
    return "ignore";
}

ColumnType parse_type(const std::string& s)
{
    if (s == "numeric")
        return ColumnType::Numeric;
    if (s == "categorical")
        return ColumnType::Categorical;
    if (s == "ignore")
        return ColumnType::Ignore;
    throw std::invalid_argument("schema: unknown column type '" + s + "'");
}

double parse_number(const std::string& s, std::size_t row, const std::string& column)
{
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (!s.empty() && *b == '+')
        ++b;
    auto res = std::from_chars(b, e, v);
    if (s.empty() || res.ec != std::errc() || res.ptr != e || !std::isfinite(v))
        throw std::runtime_error("row " + std::to_string(row) + ", column '" + column + "': '" + s +
                                 "' is not a finite number");
    return v;
}

} // namespace

ColumnType Schema::type_of(const std::string& column) const
{
    for (const auto& [name, type] : columns)
        if (name == column)
            return type;
    return ColumnType::Numeric;
}

nlohmann::json Schema::to_json() const
{
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& [name, type] : columns)
        cols.push_back({{"name", name}, {"type", type_name(type)}});
    nlohmann::json j{{"label_column", label_column}, {"columns", cols}, {"missing", missing}};
    j["positive_label"] = positive_label ? nlohmann::json(*positive_label) : nlohmann::json(nullptr);
    j["value_column"] = value_column ? nlohmann::json(*value_column) : nlohmann::json(nullptr);
    return j;
}

Schema Schema::from_json(const nlohmann::json& j)
{
    Schema s;
    s.label_column = j.at("label_column").get<std::string>();
    if (j.contains("positive_label") && !j["positive_label"].is_null())
        s.positive_label = j["positive_label"].get<std::string>();
    if (j.contains("value_column") && !j["value_column"].is_null())
        s.value_column = j["value_column"].get<std::string>();
    if (j.contains("missing"))
        s.missing = j["missing"].get<std::vector<std::string>>();
    if (j.contains("columns"))
        for (const auto& c : j["columns"])
            s.columns.emplace_back(c.at("name").get<std::string>(), parse_type(c.at("type").get<std::string>()));
    return s;
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema, bool label_flip)
{
    const auto rows = read_csv_file(path);
    if (rows.empty())
        throw std::runtime_error(path.string() + ": empty file");
    const auto& header = rows.front();
    const std::size_t ncol = header.size();

    std::optional<std::size_t> label_idx, value_idx;
    for (std::size_t c = 0; c < ncol; ++c) {
        if (header[c] == schema.label_column)
            label_idx = c;
        if (schema.value_column && header[c] == *schema.value_column)
            value_idx = c;
    }
    if (!label_idx)
        throw std::runtime_error(path.string() + ": label column '" + schema.label_column + "' not found");
    if (schema.value_column && !value_idx)
        throw std::runtime_error(path.string() + ": value column '" + *schema.value_column + "' not found");
    for (const auto& [name, type] : schema.columns)
        if (std::find(header.begin(), header.end(), name) == header.end())
            throw std::runtime_error(path.string() + ": schema column '" + name + "' not in header");

    std::set<std::string> missing(schema.missing.begin(), schema.missing.end());
    std::vector<const CsvRow*> kept;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != ncol)
            throw std::runtime_error(path.string() + " row " + std::to_string(r) + ": expected " +
                                     std::to_string(ncol) + " fields, got " + std::to_string(rows[r].size()));
        const bool has_missing = std::any_of(rows[r].begin(), rows[r].end(),
                                             [&](const std::string& f) { return missing.count(f) > 0; });
        if (!has_missing)
            kept.push_back(&rows[r]);
    }
    if (kept.empty())
        throw std::runtime_error(path.string() + ": no complete rows");

    // Feature layout.
    struct Out {
        std::size_t col;
        std::optional<std::string> category;
    };
    std::vector<Out> layout;
    Dataset ds;
    ds.name = path.stem().string();
    ds.label_flip = label_flip;
    for (std::size_t c = 0; c < ncol; ++c) {
        if (c == *label_idx || (value_idx && c == *value_idx))
            continue;
        const auto type = schema.type_of(header[c]);
        if (type == ColumnType::Ignore)
            continue;
        if (type == ColumnType::Numeric) {
            layout.push_back({c, std::nullopt});
            ds.feature_names.push_back(header[c]);
            continue;
        }
        std::set<std::string> cats;
        for (const auto* row : kept)
            cats.insert((*row)[c]);
        for (const auto& cat : cats) {
            layout.push_back({c, cat});
            ds.feature_names.push_back(header[c] + "=" + cat);
        }
    }

    ds.X = Matrix(kept.size(), layout.size());
    if (value_idx)
        ds.values.emplace();
    std::set<std::string> label_tokens;
    for (std::size_t r = 0; r < kept.size(); ++r) {
        const auto& row = *kept[r];
        const std::size_t row_no = static_cast<std::size_t>(kept[r] - rows.data());
        for (std::size_t f = 0; f < layout.size(); ++f) {
            const auto& o = layout[f];
            ds.X(r, f) = o.category ? (row[o.col] == *o.category ? 1.0 : 0.0)
                                    : parse_number(row[o.col], row_no, header[o.col]);
        }
        const std::string& lab = row[*label_idx];
        label_tokens.insert(lab);
        int y = 0;
        if (schema.positive_label) {
            y = lab == *schema.positive_label ? 1 : 0;
        } else {
            const double v = parse_number(lab, row_no, header[*label_idx]);
            if (v != 0.0 && v != 1.0)
                throw std::runtime_error(path.string() + " row " + std::to_string(row_no) + ", column '" +
                                         header[*label_idx] + "': label " + lab + " is not 0 or 1");
            y = static_cast<int>(v);
        }
        ds.y.push_back(label_flip ? 1 - y : y);
        if (value_idx) {
            const double v = parse_number(row[*value_idx], row_no, header[*value_idx]);
            if (v < 0.0)
                throw std::runtime_error(path.string() + " row " + std::to_string(row_no) + ": negative value");
            ds.values->push_back(v);
        }
    }
    if (label_tokens.size() > 2)
        throw std::runtime_error(path.string() + ": label column has more than two distinct values");
    if (schema.positive_label && !label_tokens.count(*schema.positive_label))
        throw std::runtime_error(path.string() + ": positive label '" + *schema.positive_label + "' never occurs");
    return ds;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::optional<std::string>& value_column, bool label_flip)
{
    Schema s;
    s.label_column = label_column;
    s.value_column = value_column;
    s.missing.clear();
    return load_csv(path, s, label_flip);
}

Dataset load_with_schema(const std::filesystem::path& csv_path, bool label_flip)
{
    auto schema_path = csv_path;
    schema_path.replace_extension(".schema.json");
    const auto schema = Schema::from_json(nlohmann::json::parse(read_file(schema_path)));
    return load_csv(csv_path, schema, label_flip);
}

const std::vector<std::size_t>& FourWaySplit::part(std::size_t k) const
{
    switch (k) {
    case 0:
        return dnn_train;
    case 1:
        return dnn_val;
    case 2:
        return mip_train;
    case 3:
        return test;
    default:
        throw std::out_of_range("FourWaySplit::part: index must be < 4");
    }
}

FourWaySplit split4(const Dataset& ds, const std::array<double, 4>& ratios, std::uint64_t seed)
{
    double sum = 0.0;
    for (double r : ratios) {
        if (!(r > 0.0))
            throw std::invalid_argument("split4: ratios must be positive");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("split4: ratios must sum to 1");

    std::mt19937_64 rng(seed);
    std::array<std::vector<std::size_t>, 4> parts;
    for (int cls = 0; cls <= 1; ++cls) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < ds.y.size(); ++i)
            if (ds.y[i] == cls)
                idx.push_back(i);
        std::shuffle(idx.begin(), idx.end(), rng);

        const double n = static_cast<double>(idx.size());
        std::array<std::size_t, 4> count{};
        std::array<double, 4> frac{};
        std::size_t assigned = 0;
        for (int k = 0; k < 4; ++k) {
            const double exact = ratios[k] * n;
            count[k] = static_cast<std::size_t>(std::floor(exact));
            frac[k] = exact - std::floor(exact);
            assigned += count[k];
        }
        std::array<int, 4> order{0, 1, 2, 3};
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });
        for (std::size_t k = 0; assigned < idx.size(); ++k, ++assigned)
            ++count[order[k % 4]];

        std::size_t pos = 0;
        for (int k = 0; k < 4; ++k) {
            if (count[k] == 0)
                throw std::invalid_argument("split4: part " + std::to_string(k) + " gets no instance of class " +
                                            std::to_string(cls));
            parts[k].insert(parts[k].end(), idx.begin() + pos, idx.begin() + pos + count[k]);
            pos += count[k];
        }
    }
    for (auto& p : parts)
        std::sort(p.begin(), p.end());
    return FourWaySplit{parts[0], parts[1], parts[2], parts[3]};
}

Standardizer Standardizer::fit(const Matrix& X, std::span<const std::size_t> rows)
{
    if (rows.empty())
        throw std::invalid_argument("Standardizer::fit: no rows");
    Standardizer s;
    s.mean.assign(X.cols, 0.0);
    s.sd.assign(X.cols, 0.0);
    const double n = static_cast<double>(rows.size());
    for (std::size_t r : rows)
        for (std::size_t c = 0; c < X.cols; ++c)
            s.mean[c] += X(r, c);
    for (auto& m : s.mean)
        m /= n;
    for (std::size_t r : rows)
        for (std::size_t c = 0; c < X.cols; ++c) {
            const double d = X(r, c) - s.mean[c];
            s.sd[c] += d * d;
        }
    for (auto& v : s.sd) {
        v = std::sqrt(v / n);
        if (!(v > 0.0))
            v = 1.0; // constant column
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& X, std::span<const std::size_t> rows) const
{
    if (X.cols != mean.size())
        throw std::invalid_argument("Standardizer::apply: column count mismatch");
    Matrix out(rows.size(), X.cols);
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t c = 0; c < X.cols; ++c)
            out(k, c) = (X(rows[k], c) - mean[c]) / sd[c];
    return out;
}

void SynthConfig::validate() const
{
    if (n < 2)
        throw std::invalid_argument("synth: n must be at least 2");
    if (!(fraud_ratio > 0.0 && fraud_ratio < 1.0))
        throw std::invalid_argument("synth: fraud_ratio must lie in (0, 1)");
    if (!(avg_amount > 0.0) || !std::isfinite(avg_amount))
        throw std::invalid_argument("synth: avg_amount must be positive");
    if (!(separation >= 0.0) || !(amount_sigma >= 0.0))
        throw std::invalid_argument("synth: separation and amount_sigma must be nonnegative");
}

Dataset synth_transactions(const SynthConfig& cfg)
{
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Shift direction with decaying weights, unit length.
    std::array<double, synth_feature_count> dir{};
    double norm = 0.0;
    for (std::size_t k = 0; k < synth_feature_count; ++k) {
        dir[k] = 1.0 / static_cast<double>(k + 1);
        norm += dir[k] * dir[k];
    }
    for (auto& d : dir)
        d *= cfg.separation / std::sqrt(norm);

    const double s = cfg.amount_sigma;
    const double mu_ln = std::log(cfg.avg_amount) - s * s / 2.0;

    Dataset ds;
    ds.name = cfg.name;
    ds.X = Matrix(cfg.n, synth_feature_count);
    ds.values.emplace();
    for (std::size_t k = 0; k < synth_feature_count; ++k)
        ds.feature_names.push_back("x" + std::to_string(k + 1));
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const int y = unit(rng) < cfg.fraud_ratio ? 1 : 0;
        ds.y.push_back(y);
        for (std::size_t k = 0; k < synth_feature_count; ++k)
            ds.X(i, k) = gauss(rng) + (y == 1 ? dir[k] : 0.0);
        const double amount = std::exp(mu_ln + s * gauss(rng));
        ds.values->push_back(std::round(amount * 100.0) / 100.0);
    }
    return ds;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& csv_path)
{
    std::ostringstream os;
    CsvRow header = ds.feature_names;
    if (ds.values)
        header.push_back("amount");
    header.push_back("label");
    os << join_csv(header) << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t c = 0; c < ds.X.cols; ++c)
            os << format_double(ds.X(i, c)) << ',';
        if (ds.values)
            os << format_double((*ds.values)[i]) << ',';
        os << ds.y[i] << '\n';
    }
    write_file_atomic(csv_path, os.str());

    Schema schema;
    schema.label_column = "label";
    if (ds.values)
        schema.value_column = "amount";
    schema.missing.clear();
    auto schema_path = csv_path;
    schema_path.replace_extension(".schema.json");
    write_file_atomic(schema_path, schema.to_json().dump(2) + "\n");
}

} // namespace smip
