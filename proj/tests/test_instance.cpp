#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"

using namespace vrpdt;

namespace {

const char* kSmall = R"({
  "depot": {"lat": 40.72, "lon": -73.98, "residential": true},
  "horizon_start": "2024-03-12T06:00:00",
  "fleet": {"trucks": 2, "drones_per_truck": 1, "Qt": 10, "Qd": 2, "E": 1800, "T_max": 28800,
            "drone_speed": 15, "truck_fallback_speed": 10},
  "customers": [
    {"id": 2, "lat": 40.73, "lon": -73.99, "demand": 3, "window": {"open": 600, "close": 2400}},
    {"id": 1, "lat": 40.71, "lon": -73.97, "demand": 1, "residential": true}
  ]
})";

}  // namespace

TEST(InstanceJson, ParsesAndSortsCustomers) {
    const Instance inst = parse_instance(kSmall);
    ASSERT_EQ(inst.size(), 2);
    EXPECT_EQ(inst.customer(1).demand, 1);
    EXPECT_TRUE(inst.customer(1).residential);
    ASSERT_TRUE(inst.customer(2).window.has_value());
    EXPECT_EQ(inst.customer(2).window->open, 600);
    EXPECT_TRUE(inst.depot_residential);
    EXPECT_EQ(inst.costs, CostParams{});
    EXPECT_TRUE(inst.drone_eligible(1));
    EXPECT_FALSE(inst.drone_eligible(2));
    EXPECT_FALSE(inst.drone_eligible(kDepot));
}

TEST(InstanceJson, RoundTripsThroughText) {
    Instance a = parse_instance(kSmall);
    a.costs.penalty = 250.0;
    a.calendar = Calendar(a.calendar.start(), {Calendar::parse_date("2024-03-13")});
    const Instance b = instance_from_json(instance_to_json(a));
    EXPECT_EQ(a, b);
}

TEST(InstanceJson, SaveLoadFile) {
    const Instance a = testing_support::scattered_instance(6, 4);
    const auto path = std::filesystem::temp_directory_path() / "vrpdt_instance_test.json";
    save_instance(a, path.string());
    EXPECT_EQ(load_instance(path.string()), a);
    std::filesystem::remove(path);
}

TEST(InstanceJson, UnknownKeyRejected) {
    auto doc = nlohmann::json::parse(kSmall);
    doc["fleet"]["wings"] = 2;
    EXPECT_THROW(instance_from_json(doc), FormatError);
}

TEST(InstanceJson, MissingKeyRejected) {
    auto doc = nlohmann::json::parse(kSmall);
    doc["fleet"].erase("Qd");
    EXPECT_THROW(instance_from_json(doc), FormatError);
}

TEST(InstanceJson, WrongTypeRejected) {
    auto doc = nlohmann::json::parse(kSmall);
    doc["fleet"]["trucks"] = "two";
    EXPECT_THROW(instance_from_json(doc), FormatError);
}

TEST(InstanceJson, SyntaxErrorNamesTheLine) {
    try {
        parse_instance("{\n  \"depot\": {\n  ,\n}", "inst.json");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("inst.json"), std::string::npos);
    }
}

TEST(InstanceValidate, InvertedWindow) {
    auto doc = nlohmann::json::parse(kSmall);
    doc["customers"][0]["window"] = {{"open", 2400}, {"close", 600}};
    EXPECT_THROW(instance_from_json(doc), InvariantError);
}

TEST(InstanceValidate, WindowBeyondHorizon) {
    auto doc = nlohmann::json::parse(kSmall);
    doc["customers"][0]["window"] = {{"open", 0}, {"close", 30000}};
    EXPECT_THROW(instance_from_json(doc), InvariantError);
}

TEST(InstanceValidate, NonContiguousIds) {
    auto doc = nlohmann::json::parse(kSmall);
    doc["customers"][0]["id"] = 5;
    EXPECT_THROW(instance_from_json(doc), InvariantError);
}

TEST(InstanceValidate, FleetAndCostRules) {
    Instance inst = testing_support::scattered_instance(3, 1);
    EXPECT_NO_THROW(validate(inst));
    Instance bad = inst;
    bad.fleet.trucks = 0;
    EXPECT_THROW(validate(bad), InvariantError);
    bad = inst;
    bad.fleet.drone_capacity = bad.fleet.truck_capacity + 1;
    EXPECT_THROW(validate(bad), InvariantError);
    bad = inst;
    bad.costs.drone_factor = 1.0;
    EXPECT_THROW(validate(bad), InvariantError);
    bad = inst;
    bad.customers[0].demand = 0;
    EXPECT_THROW(validate(bad), InvariantError);
    bad = inst;
    bad.customers[1].location.lat = 95.0;
    EXPECT_THROW(validate(bad), InvariantError);
}

TEST(InstanceModel, NoDronesMeansNoEligibleCustomers) {
    Instance inst = testing_support::scattered_instance(3, 1);
    inst.fleet.drones_per_truck = 0;
    for (NodeId v = 1; v <= 3; ++v) EXPECT_FALSE(inst.drone_eligible(v));
}
