#include "powexp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "powexp/errors.hpp"

namespace powexp::io {

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_exp_sum(std::ostream& out, const ExpSum& sum)
{
    out << "{\n"
        << "  \"beta\": " << format_double(sum.beta()) << ",\n"
        << "  \"t_lo\": " << format_double(sum.t_lo()) << ",\n"
        << "  \"t_hi\": " << format_double(sum.t_hi()) << ",\n"
        << "  \"provenance\": \"" << to_string(sum.provenance()) << "\",\n"
        << "  \"terms\": [";
    const auto terms = sum.terms();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        out << (i == 0 ? "\n" : ",\n") << "    {\"a\": " << format_double(terms[i].a)
            << ", \"w\": " << format_double(terms[i].w) << "}";
    }
    out << (terms.empty() ? "]\n" : "\n  ]\n") << "}\n";
}

std::string exp_sum_to_json(const ExpSum& sum)
{
    std::ostringstream os;
    write_exp_sum(os, sum);
    return os.str();
}

ExpSum exp_sum_from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::Io, std::string("exp sum json: ") + e.what());
    }
    try {
        std::vector<Term> terms;
        for (const auto& item : j.at("terms")) {
            terms.push_back({item.at("a").get<double>(), item.at("w").get<double>()});
        }
        return ExpSum(j.at("beta").get<double>(), std::move(terms), j.at("t_lo").get<double>(),
                      j.at("t_hi").get<double>(),
                      provenance_from_string(j.at("provenance").get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Io, std::string("exp sum json: ") + e.what());
    }
}

ExpSum read_exp_sum(std::istream& in)
{
    std::ostringstream os;
    os << in.rdbuf();
    return exp_sum_from_json(os.str());
}

ExpSum load_exp_sum(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    }
    return read_exp_sum(in);
}

void save_exp_sum(const std::string& path, const ExpSum& sum)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    }
    write_exp_sum(out, sum);
    if (!out) {
        throw Error(ErrorCode::Io, "write to '" + path + "' failed");
    }
}

} // namespace powexp::io
