#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "common.hpp"
#include "ldips/errors.hpp"
#include "ldips/printer.hpp"
#include "ldips/worldio.hpp"

using namespace ldips;
using testing_support::data;
using testing_support::soccer;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("ldips_test_" + name)).string();
}

template <class F>
SchemaError::Kind schema_kind(F f) {
    try {
        f();
    } catch (const SchemaError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no SchemaError";
    return SchemaError::Kind::Schema;
}

}  // namespace

TEST(Domain, LoadsSoccer) {
    const DomainDef& d = soccer();
    EXPECT_EQ(d.name, "soccer");
    EXPECT_EQ(d.actions, (std::vector<std::string>{"Goto", "Inter", "Kick"}));
    EXPECT_EQ(d.default_action, "Goto");
    ASSERT_EQ(d.inputs.size(), 4u);
    EXPECT_EQ(d.find_input("v_b")->type, ValueType::vector({1, -1, 0}));
    EXPECT_EQ(d.operators.size(), 9u);
}

TEST(Domain, RoundTripsThroughJson) {
    DomainDef again = parse_domain(domain_to_json(soccer()));
    EXPECT_EQ(again.name, soccer().name);
    EXPECT_EQ(again.actions, soccer().actions);
    EXPECT_EQ(again.operators, soccer().operators);
    ASSERT_EQ(again.inputs.size(), soccer().inputs.size());
    for (std::size_t i = 0; i < again.inputs.size(); ++i) EXPECT_EQ(again.inputs[i].type, soccer().inputs[i].type);
}

TEST(Domain, DefaultMustBeAnAction) {
    const char* text = R"({"name":"d","actions":["A"],"default_action":"B","inputs":[],"operators":[]})";
    EXPECT_EQ(schema_kind([&] { parse_domain(text); }), SchemaError::Kind::Schema);
}

TEST(Domain, UnknownOperator) {
    const char* text = R"({"name":"d","actions":["A"],"default_action":"A","inputs":[],"operators":["sqrt"]})";
    EXPECT_EQ(schema_kind([&] { parse_domain(text); }), SchemaError::Kind::UnknownOperator);
}

TEST(Domain, ConstantsAreRead) {
    const char* text =
        R"({"name":"d","actions":["A"],"default_action":"A","inputs":[{"name":"x","kind":"scalar","dim":[1,0,0]}],)"
        R"("operators":["+"],"constants":[{"value":2.5,"dim":[1,0,0]}]})";
    DomainDef d = parse_domain(text);
    ASSERT_EQ(d.constants.size(), 1u);
    EXPECT_EQ(d.constants[0].value, 2.5);
    EXPECT_EQ(d.constants[0].dim, Dimension(1, 0, 0));
}

TEST(Demos, ParsesLine) {
    Demonstration d = parse_demo(
        R"({"start":"Goto","next":"Kick","world":{"p_r":[1,2],"v_r":[0,0],"p_b":{"value":[3,4],"dim":[1,0,0]},"v_b":[0,-1]}})",
        soccer());
    EXPECT_EQ(d.start_action, "Goto");
    EXPECT_EQ(d.next_action, "Kick");
    EXPECT_EQ(d.world.start_action, "Goto");
    EXPECT_EQ(d.world.bindings.at("p_r"), Value::vec(1, 2));
    EXPECT_EQ(d.world.bindings.at("p_b"), Value::vec(3, 4));
    EXPECT_EQ(d.world.bindings.at("v_b"), Value::vec(0, -1));
}

TEST(Demos, ScalarForVectorIsRejected) {
    EXPECT_EQ(schema_kind([] {
                  parse_demo(R"({"start":"Goto","next":"Kick","world":{"p_r":1,"v_r":[0,0],"p_b":[0,0],"v_b":[0,0]}})",
                             soccer());
              }),
              SchemaError::Kind::Schema);
}

TEST(Demos, DimensionMismatch) {
    EXPECT_EQ(schema_kind([] {
                  parse_demo(R"({"start":"Goto","next":"Kick","world":{"p_r":{"value":[0,0],"dim":[0,1,0]},)"
                             R"("v_r":[0,0],"p_b":[0,0],"v_b":[0,0]}})",
                             soccer());
              }),
              SchemaError::Kind::DimensionMismatch);
}

TEST(Demos, UnknownActionAndInput) {
    EXPECT_THROW(
        parse_demo(R"({"start":"Run","next":"Kick","world":{"p_r":[0,0],"v_r":[0,0],"p_b":[0,0],"v_b":[0,0]}})", soccer()),
        SchemaError);
    EXPECT_THROW(parse_demo(R"({"start":"Goto","next":"Kick","world":{"p_r":[0,0],"v_r":[0,0],"p_b":[0,0],)"
                            R"("v_b":[0,0],"q":[0,0]}})",
                            soccer()),
                 SchemaError);
    EXPECT_THROW(parse_demo(R"({"start":"Goto","next":"Kick","world":{"p_r":[0,0]}})", soccer()), SchemaError);
}

TEST(Demos, BadJsonNamesTheLine) {
    try {
        parse_demos("\n{\"start\":", soccer());
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.where(), "line 2");
    }
}

TEST(Demos, EmptyTextHasNoDemos) {
    EXPECT_TRUE(parse_demos("", soccer()).empty());
    EXPECT_TRUE(parse_demos("\n  \n", soccer()).empty());
}

TEST(Demos, SaveLoadRoundTrip) {
    auto demos = load_demos(data("worked.demos.jsonl"), soccer());
    ASSERT_EQ(demos.size(), 8u);
    const std::string path = temp_path("demos.jsonl");
    save_demos(demos, soccer(), path);
    EXPECT_EQ(load_demos(path, soccer()), demos);
    std::filesystem::remove(path);
}

TEST(Demos, MissingFileIsIoError) { EXPECT_THROW(load_demos("/nonexistent/x.jsonl", soccer()), IoError); }

TEST(Policies, SaveLoadRoundTrip) {
    Policy p = load_policy(data("user.completed.asp"), soccer());
    const std::string path = temp_path("policy.asp");
    save_policy(p, path);
    EXPECT_EQ(read_file(path), print_policy(p));
    EXPECT_EQ(load_policy(path, soccer()), p);
    std::filesystem::remove(path);
}

TEST(Policies, ActionOutsideDomain) {
    const std::string path = temp_path("bad.asp");
    write_file(path, "if (norm(v_b) > 1): Dribble\nelse: Goto\n");
    EXPECT_THROW(load_policy(path, soccer()), ParseError);
    std::filesystem::remove(path);
}

TEST(Policies, DimensionMismatchIsTypeError) {
    const std::string path = temp_path("dim.asp");
    write_file(path, "if (norm(v_b) > 1:[1,0,0]): Kick\nelse: Goto\n");
    EXPECT_THROW(load_policy(path, soccer()), TypeError);
    std::filesystem::remove(path);
}
