package com.shop.orders.web;

import org.springframework.web.bind.annotation.*;
import com.shop.orders.domain.Order;
import com.shop.orders.service.OrderService;

@RestController
@RequestMapping("/api/orders")
public class OrderController {
    private final OrderService orderService;

    public OrderController(OrderService orderService) {
        this.orderService = orderService;
    }

    @GetMapping("/{id}")
    public Order getOrder(@PathVariable Long id) {
        return orderService.find(id);
    }

    @PostMapping
    public Order placeOrder(@RequestBody Order order) {
        return orderService.placeOrder(order);
    }

    @DeleteMapping("/{id}")
    public void cancel(@PathVariable Long id) {
        orderService.cancelShipment(id);
    }
}
